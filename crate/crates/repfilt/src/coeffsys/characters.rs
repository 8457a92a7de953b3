//! Exact class-function arithmetic with values in ℤ[x]/Φ_m(x).
//!
//! This is enough machinery to restrict, conjugate and induce characters and
//! to decompose the results integrally against a basis of indecomposable
//! characters. No value multiplication is ever needed, so the representation
//! stays a plain integer vector per value.

use num_bigint::BigInt;

use crate::exactalg::{solve_left, IntMatrix};
use crate::groups::{ElemId, PermGroup};

/// Cyclotomic context: integer vectors of length deg(Φ_m) encode elements
/// of ℤ[ζ_m] over the power basis 1, x, …, x^{deg-1}.
pub struct CycCtx {
    pub m: usize,
    deg: usize,
    /// x^k mod Φ_m for 0 <= k < m.
    powers: Vec<Vec<i64>>,
}

fn cyclotomic_poly(m: usize) -> Vec<i64> {
    // x^m - 1 divided by all Φ_d with d | m, d < m.
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem: Vec<i64> = num.to_vec();
    let dd = den.len() - 1;
    assert_eq!(den[dd], 1, "divisor must be monic");
    let mut quot = vec![0i64; rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (i, &dc) in den.iter().enumerate() {
                rem[k + i] -= c * dc;
            }
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "non-exact polynomial division");
    quot
}

impl CycCtx {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        let mut powers: Vec<Vec<i64>> = Vec::with_capacity(m);
        // x^0 .. x^{m-1} reduced mod Φ_m.
        let mut current = vec![0i64; deg.max(1)];
        if deg == 0 {
            // Never happens for m >= 1 (deg Φ_1 = 1).
            unreachable!();
        }
        current[0] = 1;
        for _ in 0..m {
            powers.push(current.clone());
            // Multiply by x and reduce.
            let mut next = vec![0i64; deg + 1];
            for (i, &c) in current.iter().enumerate() {
                next[i + 1] = c;
            }
            let lead = next[deg];
            if lead != 0 {
                for i in 0..=deg {
                    next[i] -= lead * phi[i];
                }
            }
            debug_assert_eq!(next[deg], 0);
            next.truncate(deg);
            current = next;
        }
        CycCtx { m, deg, powers }
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.deg]
    }

    pub fn int(&self, c: i64) -> Vec<i64> {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    /// ζ_m^k.
    pub fn root(&self, k: usize) -> Vec<i64> {
        self.powers[k % self.m].clone()
    }

    pub fn add_assign(a: &mut [i64], b: &[i64]) {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
    }

    pub fn div_exact(a: &[i64], q: i64) -> Option<Vec<i64>> {
        a.iter()
            .map(|&x| if x % q == 0 { Some(x / q) } else { None })
            .collect()
    }
}

/// A class function on an actual subgroup, one value per element in the
/// subgroup's sorted element-id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFn {
    pub values: Vec<Vec<i64>>,
}

impl ClassFn {
    pub fn constant(ctx: &CycCtx, size: usize, c: i64) -> Self {
        ClassFn {
            values: vec![ctx.int(c); size],
        }
    }

    pub fn dim(&self) -> i64 {
        // Value at the identity, which sorts first; integer for genuine
        // characters.
        self.values[0][0]
    }
}

fn position(elems: &[ElemId], x: ElemId) -> usize {
    elems.binary_search(&x).expect("element not in subgroup")
}

/// Restriction of `f` on `sup` to `sub` (both sorted, sub ⊆ sup).
pub fn restrict_values(sup: &[ElemId], f: &ClassFn, sub: &[ElemId]) -> ClassFn {
    ClassFn {
        values: sub
            .iter()
            .map(|&x| f.values[position(sup, x)].clone())
            .collect(),
    }
}

/// The conjugate f^n on s^n, defined by f^n(x) = f(n·x·n⁻¹).
pub fn conj_values(g: &PermGroup, s: &[ElemId], f: &ClassFn, n: ElemId) -> ClassFn {
    let target = g.conj_set(s, n);
    let n_inv = g.inv(n);
    ClassFn {
        values: target
            .iter()
            .map(|&x| {
                let back = g.conj(x, n_inv); // n·x·n⁻¹
                f.values[position(s, back)].clone()
            })
            .collect(),
    }
}

/// Induced class function from `sub` to `sup`; None if the division by
/// |sub| is not exact (which cannot happen for genuine characters).
pub fn induce_values(
    ctx: &CycCtx,
    g: &PermGroup,
    sub: &[ElemId],
    f: &ClassFn,
    sup: &[ElemId],
) -> Option<ClassFn> {
    let mut values = Vec::with_capacity(sup.len());
    for &t in sup {
        let mut acc = ctx.zero();
        for &x in sup {
            let y = g.conj(t, x); // x⁻¹·t·x
            if sub.binary_search(&y).is_ok() {
                CycCtx::add_assign(&mut acc, &f.values[position(sub, y)]);
            }
        }
        values.push(CycCtx::div_exact(&acc, sub.len() as i64)?);
    }
    Some(ClassFn { values })
}

/// Integral decomposition of `target` against `basis`; None if no integer
/// solution exists.
pub fn decompose(basis: &[ClassFn], target: &ClassFn) -> Option<Vec<i64>> {
    if basis.is_empty() {
        return None;
    }
    let width = target.values.len() * target.values[0].len();
    let mut b = IntMatrix::zero(basis.len(), width);
    for (i, f) in basis.iter().enumerate() {
        let flat: Vec<i64> = f.values.iter().flatten().copied().collect();
        assert_eq!(flat.len(), width, "basis/target shape mismatch");
        for (j, &v) in flat.iter().enumerate() {
            b.set(i, j, BigInt::from(v));
        }
    }
    let c: Vec<BigInt> = target
        .values
        .iter()
        .flatten()
        .map(|&v| BigInt::from(v))
        .collect();
    let x = solve_left(&b, &c)?;
    x.into_iter().map(|v| i64::try_from(&v).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::parse_group_spec;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(5), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn roots_sum_to_zero_for_prime_m() {
        let ctx = CycCtx::new(5);
        let mut acc = ctx.zero();
        for k in 0..5 {
            CycCtx::add_assign(&mut acc, &ctx.root(k));
        }
        assert!(acc.iter().all(|&c| c == 0));
    }

    #[test]
    fn induction_of_trivial_character_from_c3_to_s3() {
        let g = parse_group_spec("S3").unwrap();
        let ctx = CycCtx::new(1);
        let data = g.subgroup_data().unwrap();
        let c3 = data.classes[2].rep.clone();
        let all: Vec<ElemId> = (0..6).collect();
        let f = ClassFn::constant(&ctx, 3, 1);
        let ind = induce_values(&ctx, &g, &c3, &f, &all).unwrap();
        // Ind is 1 + sgn: value 2 on A3, 0 on transpositions.
        for (pos, &e) in all.iter().enumerate() {
            let expect = if g.elem_order(e) == 2 { 0 } else { 2 };
            assert_eq!(ind.values[pos], ctx.int(expect));
        }
    }

    #[test]
    fn decompose_regular_character_of_c3() {
        let g = parse_group_spec("C3").unwrap();
        let ctx = CycCtx::new(3);
        let elems: Vec<ElemId> = (0..3).collect();
        // Characters eta^i via discrete log on the generator with id 1.
        let gen = 1 as ElemId;
        let mut dlog = vec![0usize; 3];
        let mut cur = 0 as ElemId;
        for a in 0..3 {
            dlog[cur as usize] = a;
            cur = g.mul(cur, gen);
        }
        let chi = |i: usize| ClassFn {
            values: elems
                .iter()
                .map(|&e| ctx.root(i * dlog[e as usize]))
                .collect(),
        };
        let basis = [chi(0), chi(1), chi(2)];
        let trivial = ClassFn::constant(&ctx, 1, 1);
        let id_sub = vec![0 as ElemId];
        let reg = induce_values(&ctx, &g, &id_sub, &trivial, &elems).unwrap();
        assert_eq!(decompose(&basis, &reg), Some(vec![1, 1, 1]));
    }
}
