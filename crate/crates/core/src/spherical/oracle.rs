//! Brute-force construction of `Ψ(φ_λ)` inside the irreducible module
//! `V(λ)`, realized as words in the lowering operators `f₀, f₁` applied to
//! the highest weight vector and taken modulo the radical of the
//! contravariant form.
//!
//! With `B_j = i(e_j − f_j)` the Onsager conditions become recursions:
//! a functional `F` with `F ∘ B_j = χ_j F` satisfies
//! `F(f_j w) = F(e_j w) + iχ_j F(w)`, and the vector `v` with `B_j v = η_j v`
//! is described by `φ(u) = S(u, v)`, which obeys the same recursion with
//! `−η_j` in place of `χ_j`.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::admissible;
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::formal_series::TruncatedSeries;
use crate::radial_operator::Character1D;
use crate::weight_lattice::Weight;

type Word = Vec<u8>;

struct Module {
    h: [i64; 2],
    gram: HashMap<(Word, Word), BigRational>,
}

fn cartan(i: u8, j: u8) -> i64 {
    if i == j {
        2
    } else {
        -2
    }
}

impl Module {
    fn new(l: &Weight) -> Self {
        Module { h: [l.h0(), l.h1()], gram: HashMap::new() }
    }

    /// `e_i` applied to `f_{w₀} f_{w₁} ⋯ v_λ`.
    fn apply_e(&self, i: u8, w: &[u8]) -> Vec<(i64, Word)> {
        let mut out = Vec::new();
        for p in 0..w.len() {
            if w[p] != i {
                continue;
            }
            let c = self.h[i as usize] - w[p + 1..].iter().map(|&j| cartan(i, j)).sum::<i64>();
            if c != 0 {
                let mut rest = w.to_vec();
                rest.remove(p);
                out.push((c, rest));
            }
        }
        out
    }

    fn shapovalov(&mut self, u: &[u8], w: &[u8]) -> BigRational {
        if u.len() != w.len() {
            return BigRational::zero();
        }
        if u.is_empty() {
            return BigRational::from_integer(1.into());
        }
        let key = (u.to_vec(), w.to_vec());
        if let Some(v) = self.gram.get(&key) {
            return v.clone();
        }
        let mut s = BigRational::zero();
        for (c, rest) in self.apply_e(u[0], w) {
            s += self.shapovalov(&u[1..], &rest) * num_bigint::BigInt::from(c);
        }
        self.gram.insert(key, s.clone());
        s
    }

    fn functional(&self, c: &[Coefficient; 2], w: &[u8], memo: &mut HashMap<Word, Coefficient>) -> Coefficient {
        if w.is_empty() {
            return Coefficient::one();
        }
        if let Some(v) = memo.get(w) {
            return v.clone();
        }
        let j = w[0];
        let mut s = &(&Coefficient::i() * &c[j as usize]) * &self.functional(c, &w[1..], memo);
        for (k, rest) in self.apply_e(j, &w[1..]) {
            s += &self.functional(c, &rest, memo) * &Coefficient::from_int(k);
        }
        memo.insert(w.to_vec(), s.clone());
        s
    }
}

fn words(n0: usize, n1: usize) -> Vec<Word> {
    if n0 == 0 && n1 == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    if n0 > 0 {
        for mut w in words(n0 - 1, n1) {
            w.insert(0, 0);
            out.push(w);
        }
    }
    if n1 > 0 {
        for mut w in words(n0, n1 - 1) {
            w.insert(0, 1);
            out.push(w);
        }
    }
    out
}

/// Row reduce `m` (rows × cols) in place; returns pivot columns.
fn row_reduce(m: &mut [Vec<Coefficient>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= &sub;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

fn gram_matrix(module: &mut Module, ws: &[Word]) -> Vec<Vec<Coefficient>> {
    ws.iter()
        .map(|u| ws.iter().map(|w| Coefficient::from_rational(module.shapovalov(u, w))).collect())
        .collect()
}

/// `dim V(λ)_{λ − n₀α₀ − n₁α₁}`, the rank of the contravariant form on
/// the corresponding words.
pub fn weight_multiplicity(l: &Weight, n0: usize, n1: usize) -> Result<usize> {
    if !l.is_dominant() {
        return Err(Error::NotDominant(l.a, l.k, l.m));
    }
    let mut module = Module::new(l);
    let ws = words(n0, n1);
    let mut g = gram_matrix(&mut module, &ws);
    Ok(row_reduce(&mut g).len())
}

/// `Ψ(φ_λ)` on all weights `λ − n₀α₀ − n₁α₁` with `n₀ + n₁ ≤ depth`,
/// computed inside `V(λ)`. Intended for small level and depth.
pub fn oracle_spherical(l: &Weight, eta: &Character1D, chi: &Character1D, depth: usize) -> Result<TruncatedSeries> {
    if !admissible(l, eta, chi)? {
        return Err(Error::Inadmissible(format!("lambda = {l} with eta = ({eta}), chi = ({chi})")));
    }
    if depth > 6 || l.k > 4 {
        return Err(Error::OutOfBounds(format!("oracle limited to depth 6 and level 4, got {depth}, {}", l.k)));
    }
    let mut module = Module::new(l);
    let cf = [Coefficient::from_rational(chi.b0.clone()), Coefficient::from_rational(chi.b1.clone())];
    let cv = [-Coefficient::from_rational(eta.b0.clone()), -Coefficient::from_rational(eta.b1.clone())];
    let mut memo_f = HashMap::new();
    let mut memo_v = HashMap::new();
    let mut terms = Vec::new();
    for s in 0..=depth {
        for n0 in 0..=s {
            let n1 = s - n0;
            let ws = words(n0, n1);
            let g = gram_matrix(&mut module, &ws);
            let f: Vec<Coefficient> = ws.iter().map(|w| module.functional(&cf, w, &mut memo_f)).collect();
            let v: Vec<Coefficient> = ws.iter().map(|w| module.functional(&cv, w, &mut memo_v)).collect();
            // Columns of [G | v] and rows of [G; f] must have the rank of G,
            // otherwise the functionals do not factor through V(λ).
            let mut g_red = g.clone();
            let basis = row_reduce(&mut g_red);
            let mut gv: Vec<Vec<Coefficient>> = g.iter().zip(&v).map(|(row, x)| {
                let mut r = row.clone();
                r.push(x.clone());
                r
            }).collect();
            let mut gf: Vec<Vec<Coefficient>> = g.clone();
            gf.push(f.clone());
            let gf_t: Vec<Vec<Coefficient>> =
                (0..ws.len()).map(|j| gf.iter().map(|row| row[j].clone()).collect()).collect();
            let mut gf_t = gf_t;
            if row_reduce(&mut gv).len() != basis.len() || row_reduce(&mut gf_t).len() != basis.len() {
                return Err(Error::Inadmissible(format!(
                    "invariant functional does not vanish on the radical at depth ({n0},{n1})"
                )));
            }
            if basis.is_empty() {
                continue;
            }
            // Solve G_BB x = v_B, coefficient = f_B · x.
            let mut aug: Vec<Vec<Coefficient>> = basis
                .iter()
                .map(|&i| {
                    let mut r: Vec<Coefficient> = basis.iter().map(|&j| g[i][j].clone()).collect();
                    r.push(v[i].clone());
                    r
                })
                .collect();
            row_reduce(&mut aug);
            let b = basis.len();
            let mut coef = Coefficient::zero();
            for (row, &i) in aug.iter().zip(&basis) {
                coef += &f[i] * &row[b];
            }
            if !coef.is_zero() {
                let mu = *l - (n0 as i64) * Weight::ALPHA0 - (n1 as i64) * Weight::ALPHA1;
                terms.push((mu, coef));
            }
        }
    }
    TruncatedSeries::from_terms(l.k, terms, Some(l.g2() - 2 * depth as i64), Some(l.g2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_representation_multiplicities() {
        // V(ϖ₀): the weights ϖ₀ − α₀ and ϖ₀ − α₀ − α₁ are 1-dimensional,
        // ϖ₀ − α₁ is not a weight.
        assert_eq!(weight_multiplicity(&Weight::OMEGA0, 1, 0).unwrap(), 1);
        assert_eq!(weight_multiplicity(&Weight::OMEGA0, 0, 1).unwrap(), 0);
        assert_eq!(weight_multiplicity(&Weight::OMEGA0, 1, 1).unwrap(), 1);
        assert_eq!(weight_multiplicity(&Weight::ZERO, 1, 1).unwrap(), 0);
    }

    #[test]
    fn trivial_module() {
        let r = oracle_spherical(&Weight::ZERO, &Character1D::trivial(), &Character1D::trivial(), 3).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff(&Weight::ZERO), Coefficient::one());
    }
}
