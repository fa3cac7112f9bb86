//! Dense univariate integer polynomials, used as the fast path whenever both
//! operands of a `Poly` operation live in a single variable.
//!
//! Coefficient vectors are indexed by exponent and always trimmed (no trailing
//! zeros); the zero polynomial is the empty vector.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modular::{inv_mod, mul_mod, reduce, sub_mod, word_primes};

/// Below this length schoolbook multiplication beats packing.
const KRONECKER_THRESHOLD: usize = 24;

pub fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn max_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|c| c.bits()).max().unwrap_or(0)
}

fn bit_len(x: usize) -> u64 {
    (usize::BITS - x.leading_zeros()) as u64
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o += s;
    }
    trim(&mut out);
    out
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (o, s) in out.iter_mut().zip(b) {
        *o -= s;
    }
    trim(&mut out);
    out
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) < KRONECKER_THRESHOLD {
        mul_schoolbook(a, b)
    } else {
        mul_kronecker(a, b)
    }
}

fn mul_schoolbook(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

/// Evaluates the polynomial at `2^slot` as one big integer.
fn pack(v: &[BigInt], slot: u64) -> BigInt {
    let total_bits = slot * v.len() as u64 + 64;
    let words = (total_bits / 64 + 1) as usize;
    let mut pos = vec![0u64; words];
    let mut neg = vec![0u64; words];
    let mut any_neg = false;
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let target = if c.is_negative() {
            any_neg = true;
            &mut neg
        } else {
            &mut pos
        };
        or_shifted(target, &c.magnitude().to_u64_digits(), slot * i as u64);
    }
    let p = BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&to_u32(&pos)));
    if any_neg {
        p - BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&to_u32(&neg)))
    } else {
        p
    }
}

fn to_u32(words: &[u64]) -> Vec<u32> {
    words
        .iter()
        .flat_map(|w| [*w as u32, (*w >> 32) as u32])
        .collect()
}

fn or_shifted(target: &mut [u64], digits: &[u64], bit_offset: u64) {
    let word = (bit_offset / 64) as usize;
    let shift = bit_offset % 64;
    for (k, d) in digits.iter().enumerate() {
        target[word + k] |= d << shift;
        if shift != 0 {
            target[word + k + 1] |= d >> (64 - shift);
        }
    }
}

/// Reads bits `[start, start + len)` of a little-endian word array.
fn extract_bits(words: &[u64], start: u64, len: u64) -> BigUint {
    let nwords = (len / 64 + 2) as usize;
    let mut out = vec![0u64; nwords];
    let first = (start / 64) as usize;
    let shift = start % 64;
    for (k, o) in out.iter_mut().enumerate() {
        let lo = words.get(first + k).copied().unwrap_or(0);
        let hi = words.get(first + k + 1).copied().unwrap_or(0);
        *o = if shift == 0 {
            lo
        } else {
            (lo >> shift) | (hi << (64 - shift))
        };
    }
    // mask to len bits
    let full = (len / 64) as usize;
    let rem = len % 64;
    if full < out.len() {
        if rem == 0 {
            out.truncate(full);
        } else {
            out[full] &= (1u64 << rem) - 1;
            out.truncate(full + 1);
        }
    }
    BigUint::from_slice(&to_u32(&out))
}

/// Splits a packed integer back into balanced digits in `[-2^(slot-1), 2^(slot-1))`.
fn unpack(x: &BigInt, slot: u64, count: usize) -> Vec<BigInt> {
    let negative = x.is_negative();
    let words = x.magnitude().to_u64_digits();
    let half = BigUint::one() << (slot - 1);
    let base = BigUint::one() << slot;
    let mut carry = false;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut d = extract_bits(&words, slot * i as u64, slot);
        if carry {
            d += 1u32;
        }
        let c = if d >= half {
            carry = true;
            BigInt::from_biguint(Sign::Plus, d) - BigInt::from_biguint(Sign::Plus, base.clone())
        } else {
            carry = false;
            BigInt::from_biguint(Sign::Plus, d)
        };
        out.push(if negative { -c } else { c });
    }
    trim(&mut out);
    out
}

fn mul_kronecker(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let slot = max_bits(a) + max_bits(b) + bit_len(a.len().min(b.len())) + 2;
    let prod = pack(a, slot) * pack(b, slot);
    unpack(&prod, slot, a.len() + b.len() - 1)
}

pub fn scale(a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|x| x * c).collect()
}

pub fn content(a: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Exact quotient `a / b`, or `None` when `b` does not divide `a` over `Z`.
pub fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert!(!b.is_empty(), "division by the zero polynomial");
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    if b.len() == 1 {
        let d = &b[0];
        let mut out = Vec::with_capacity(a.len());
        for c in a {
            let (qt, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.push(qt);
        }
        return Some(out);
    }
    if b.len() >= KRONECKER_THRESHOLD && a.len() - b.len() + 1 >= KRONECKER_THRESHOLD {
        return div_exact_kronecker(a, b);
    }
    div_exact_long(a, b)
}

fn div_exact_long(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lc = &b[db];
    let qlen = a.len() - db;
    let mut quot = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let top = &rem[k + db];
        if top.is_zero() {
            continue;
        }
        let (qt, r) = top.div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        for (t, bc) in b.iter().enumerate() {
            if !bc.is_zero() {
                rem[k + t] -= &qt * bc;
            }
        }
        quot[k] = qt;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    trim(&mut quot);
    Some(quot)
}

fn div_exact_kronecker(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let qlen = a.len() - b.len() + 1;
    // coefficient bound on any exact quotient: 2^deg(q) * |a|_2
    let norm_bits = max_bits(a) + bit_len(a.len()) + 1;
    let ceiling = norm_bits + qlen as u64 + 2;
    let mut slot = max_bits(a) + 8;
    loop {
        let pa = pack(a, slot);
        let pb = pack(b, slot);
        let (qt, r) = pa.div_rem(&pb);
        if !r.is_zero() {
            return None;
        }
        let cand = unpack(&qt, slot, qlen);
        if cand.len() == qlen && mul(&cand, b) == a {
            return Some(cand);
        }
        if slot > ceiling {
            return None;
        }
        slot = (slot * 2).min(ceiling + 1);
    }
}

fn reduce_vec(a: &[BigInt], p: u64) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().map(|c| reduce(c, p)).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Monic gcd over `Z/pZ`.
fn gcd_mod(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a, b);
    while !y.is_empty() {
        let r = rem_mod(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lc) = x.last() {
        let inv = inv_mod(lc, p).expect("nonzero leading coefficient");
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

fn rem_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p).expect("nonzero leading coefficient");
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let f = mul_mod(top, inv, p);
            let off = r.len() - 1 - db;
            for (k, bc) in b.iter().enumerate() {
                r[off + k] = sub_mod(r[off + k], mul_mod(f, *bc, p), p);
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

/// Gcd over `Z` with positive leading coefficient, via images modulo word
/// primes, CRT and trial division. Both inputs must be nonzero.
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    assert!(!a.is_empty() && !b.is_empty());
    let ca = content(a);
    let cb = content(b);
    let c = ca.gcd(&cb);
    if a.len() == 1 || b.len() == 1 {
        return vec![c];
    }
    let a: Vec<BigInt> = a.iter().map(|x| x / &ca).collect();
    let b: Vec<BigInt> = b.iter().map(|x| x / &cb).collect();
    if a == b {
        return normalize(scale(&a, &c));
    }
    let lc_gcd = a.last().unwrap().gcd(b.last().unwrap());

    let mut degree = usize::MAX;
    let mut acc: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut previous: Option<Vec<BigInt>> = None;
    for p in word_primes() {
        let am = reduce_vec(&a, p);
        let bm = reduce_vec(&b, p);
        if am.len() != a.len() || bm.len() != b.len() {
            continue;
        }
        let g = gcd_mod(am, bm, p);
        let d = g.len() - 1;
        if d == 0 {
            return vec![c];
        }
        if d > degree {
            continue;
        }
        let lcm = reduce(&lc_gcd, p);
        let image: Vec<u64> = g.iter().map(|x| mul_mod(*x, lcm, p)).collect();
        if d < degree {
            degree = d;
            acc = image.iter().map(|&x| BigInt::from(x)).collect();
            modulus = BigInt::from(p);
            previous = None;
        } else {
            crt_combine(&mut acc, &modulus, &image, p);
            modulus *= p;
        }
        let lifted = symmetric(&acc, &modulus);
        let cont = content(&lifted);
        let cand: Vec<BigInt> = lifted.iter().map(|x| x / &cont).collect();
        if previous.as_ref() == Some(&cand)
            && div_exact(&a, &cand).is_some()
            && div_exact(&b, &cand).is_some()
        {
            return normalize(scale(&cand, &c));
        }
        previous = Some(cand);
    }
    unreachable!("ran out of word primes")
}

fn crt_combine(acc: &mut [BigInt], modulus: &BigInt, image: &[u64], p: u64) {
    let m_mod_p = reduce(modulus, p);
    let inv = inv_mod(m_mod_p, p).expect("distinct primes");
    for (x, &r) in acc.iter_mut().zip(image) {
        let xr = reduce(x, p);
        let t = mul_mod(sub_mod(r, xr, p), inv, p);
        *x += modulus * BigInt::from(t);
    }
}

fn symmetric(acc: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    let half: BigInt = modulus >> 1;
    acc.iter()
        .map(|x| {
            let r = x.mod_floor(modulus);
            if r > half {
                r - modulus
            } else {
                r
            }
        })
        .collect()
}

fn normalize(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut v);
    if v.last().is_some_and(|c| c.is_negative()) {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = xs.iter().map(|&x| BigInt::from(x)).collect();
        trim(&mut out);
        out
    }

    #[test]
    fn kronecker_matches_schoolbook() {
        let a: Vec<BigInt> = (0..60).map(|i| BigInt::from((i * 7919 % 23) as i64 - 11)).collect();
        let mut b: Vec<BigInt> = (0..45).map(|i| BigInt::from((i * 104729 % 31) as i64 - 15)).collect();
        b[3] = BigInt::from(-1) << 200;
        assert_eq!(mul_kronecker(&a, &b), mul_schoolbook(&a, &b));
    }

    #[test]
    fn exact_division_both_paths() {
        let a: Vec<BigInt> = (0..40).map(|i| BigInt::from(i as i64 - 20)).collect();
        let b: Vec<BigInt> = (0..30).map(|i| BigInt::from((i * 3) as i64 % 7 - 3)).collect();
        let b = normalize(b);
        let prod = mul(&a, &b);
        assert_eq!(div_exact(&prod, &b).unwrap(), a);
        assert_eq!(div_exact_long(&prod, &b).unwrap(), a);
        let mut bumped = prod.clone();
        bumped[0] += 1;
        assert!(div_exact(&bumped, &b).is_none());
        assert!(div_exact_long(&bumped, &b).is_none());
    }

    #[test]
    fn gcd_of_q_brackets() {
        // gcd(q^2 - 1, q^3 - 1) = q - 1
        assert_eq!(gcd(&v(&[-1, 0, 1]), &v(&[-1, 0, 0, 1])), v(&[-1, 1]));
        assert_eq!(gcd(&v(&[2, 4]), &v(&[6])), v(&[2]));
        assert_eq!(gcd(&v(&[-3, -3]), &v(&[-3, -3])), v(&[3, 3]));
    }
}
