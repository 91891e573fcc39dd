use std::sync::Arc;

use super::im2form::frame_and_multiples;
use crate::algebroid::{koszul_d, Connection, FormValued, LieAlgebroid};
use crate::error::{dim_err, Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::rep2::{Rep2, RepMorphism};
use crate::report::{Comparison, Report};

/// A pair of algebroids on `A` and `A*` over the same chart, with a
/// `TM`-connection on `A`. The frame of `A*` is dual to the frame of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct BialgebroidData {
    pub a: Arc<LieAlgebroid>,
    pub astar: Arc<LieAlgebroid>,
    pub nabla: Connection,
}

impl BialgebroidData {
    pub fn new(a: Arc<LieAlgebroid>, astar: Arc<LieAlgebroid>, nabla: Connection) -> Result<Self> {
        if a.chart() != astar.chart() || a.rank() != astar.rank() {
            return Err(dim_err("bialgebroid", "A and A* must share the chart and the rank"));
        }
        if nabla.rank() != a.rank() || !nabla.algebroid_arc().is_tangent() || nabla.algebroid_arc().chart() != a.chart() {
            return Err(dim_err("bialgebroid", "∇ must be a TM-connection on A"));
        }
        for (name, alg) in [("A", &a), ("A*", &astar)] {
            let r = alg.verify();
            if !r.passed() {
                return Err(Error::Precondition(format!("{name} is not a Lie algebroid:\n{r}")));
            }
        }
        Ok(BialgebroidData { a, astar, nabla })
    }

    /// `T^bas(α, β) = [α, β]_{A*} + ∇*_{ρ*(β)}α − ∇*_{ρ*(α)}β`.
    pub fn torsion_basic(&self, alpha: &[Poly], beta: &[Poly]) -> Result<Vec<Poly>> {
        let dual = self.nabla.dual();
        let br = self.astar.bracket(alpha, beta)?;
        let x = dual.apply(&self.astar.anchor_field(beta), alpha)?;
        let y = dual.apply(&self.astar.anchor_field(alpha), beta)?;
        Ok(br.iter().zip(&x).zip(&y).map(|((p, q), r)| &(p + q) - r).collect())
    }

    /// `⟨Φ_{e_i}(ε^m), ε^l⟩ = T^bas(ε^m, ε^l)_i`.
    pub fn homotopy(&self) -> Result<FormValued> {
        let (k, n) = (self.a.rank(), self.a.dim());
        let mut blocks = vec![PolyMatrix::zeros(k, k, n); k];
        for m in 0..k {
            for l in 0..k {
                let t = self.torsion_basic(&self.astar.frame(m), &self.astar.frame(l))?;
                for (i, ti) in t.into_iter().enumerate() {
                    blocks[i].set(l, m, ti);
                }
            }
        }
        FormValued::one_form(blocks, k, k, n)
    }

    /// `(−ρ*_{A*}, ρ_{A*}, T^bas)` from the dual of the adjoint representation
    /// to the adjoint representation.
    pub fn morphism(&self) -> Result<RepMorphism> {
        let ad = Rep2::adjoint(self.a.clone(), &self.nabla)?;
        let rho = self.astar.anchor().clone();
        RepMorphism::new(
            ad.dual(),
            ad,
            PolyMatrix::identity(self.a.rank(), self.a.dim()),
            -rho.transpose(),
            rho,
            self.homotopy()?,
        )
    }

    /// `d_{A*}a` as a bivector, `P[l][m] = (d_{A*}a)(ε^l, ε^m)`.
    pub fn d_star(&self, a: &[Poly]) -> Result<PolyMatrix> {
        let (k, n) = (self.a.rank(), self.a.dim());
        let w = FormValued::from_fn(k, 1, 1, 1, n, |t| PolyMatrix::column_vector(&[a[t[0]].clone()], n));
        let d = koszul_d(&Connection::flat(self.astar.clone(), 1), &w)?;
        Ok(PolyMatrix::from_fn(k, k, n, |l, m| d.eval(&[l, m]).get(0, 0).clone()))
    }
}

/// `(L_a P)(α, β) = ρ(a)P(α, β) − P(L_a α, β) − P(α, L_a β)` on bivectors
/// stored as antisymmetric matrices over the dual frame.
pub fn lie_derivative_bivector(alg: &LieAlgebroid, p: &PolyMatrix, a: &[Poly]) -> Result<PolyMatrix> {
    let k = alg.rank();
    if p.shape() != (k, k) {
        return Err(dim_err("bivector", format!("expected {k}x{k}")));
    }
    // (L_a ε^l)_q = −[a, e_q]^l
    let mut la = PolyMatrix::zeros(k, k, alg.dim());
    for q in 0..k {
        for (l, c) in alg.bracket(a, &alg.frame(q))?.into_iter().enumerate() {
            la.set(l, q, -c);
        }
    }
    let field = alg.anchor_field(a);
    let deriv = p.derive_along(&field);
    Ok(&(&deriv - &(&la * p)) - &(p * &la.transpose()))
}

/// `[P, a]` for a bivector `P` and a section `a`, i.e. `−L_a P`.
pub fn schouten_low(p: &PolyMatrix, a: &[Poly], alg: &LieAlgebroid) -> Result<PolyMatrix> {
    Ok(-lie_derivative_bivector(alg, p, a)?)
}

/// `d_{A*}[a, b] − [d_{A*}a, b] − [a, d_{A*}b]` on frames and coordinate
/// multiples of frames.
pub fn derivation_oracle(data: &BialgebroidData) -> Result<Report> {
    let alg = &data.a;
    let sections = frame_and_multiples(alg);
    let mut rep = Report::new("d_star_derivation");
    for (p, a) in sections.iter().enumerate() {
        for (q, b) in sections.iter().enumerate().skip(p + 1) {
            let lhs = data.d_star(&alg.bracket(a, b)?)?;
            let t1 = schouten_low(&data.d_star(a)?, b, alg)?;
            // [a, Q] = −[Q, a]
            let t2 = -schouten_low(&data.d_star(b)?, a, alg)?;
            rep.push("derivation", &[p, q], &(&lhs - &t1) - &t2);
        }
    }
    Ok(rep)
}

pub fn bialgebroid_check(data: &BialgebroidData) -> Result<Comparison> {
    let v1 = data.morphism()?.verify()?;
    let v2 = derivation_oracle(data)?;
    Ok(Comparison::new("bialgebroid", v1, v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::BaseChart;
    use crate::poly::rat;
    use crate::random::Gen;
    use crate::rep2::tm_connection;

    fn over_point(a: LieAlgebroid, b: LieAlgebroid) -> BialgebroidData {
        let a = Arc::new(a);
        let nab = tm_connection(a.chart(), a.rank(), vec![]).unwrap();
        BialgebroidData::new(a, Arc::new(b), nab).unwrap()
    }

    fn bivector(k: usize, i: usize, j: usize, nv: usize) -> PolyMatrix {
        PolyMatrix::from_fn(k, k, nv, |l, m| {
            if (l, m) == (i, j) {
                Poly::one(nv)
            } else if (l, m) == (j, i) {
                -Poly::one(nv)
            } else {
                Poly::zero(nv)
            }
        })
    }

    #[test]
    fn schouten_examples() {
        let so3 = LieAlgebroid::so3();
        assert!(schouten_low(&bivector(3, 0, 1, 0), &so3.frame(2), &so3).unwrap().is_zero());
        let t = LieAlgebroid::tangent(BaseChart::standard(2));
        let f = &Poly::var(2, 0).pow(2) * &Poly::var(2, 1);
        let p = bivector(2, 0, 1, 2).scale_poly(&f);
        let got = schouten_low(&p, &t.frame(0), &t).unwrap();
        assert_eq!(got, bivector(2, 0, 1, 2).scale_poly(&-f.partial(0).unwrap()));
        let ab = LieAlgebroid::lie_algebra(2, &[]).unwrap();
        assert!(schouten_low(&bivector(2, 0, 1, 0), &ab.frame(1), &ab).unwrap().is_zero());
    }

    #[test]
    fn trivial_bialgebroid_on_the_line() {
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(1)));
        let zero = Arc::new(LieAlgebroid::new(BaseChart::standard(1), PolyMatrix::zeros(1, 1, 1), vec![]).unwrap());
        let nab = tm_connection(a.chart(), 1, vec![PolyMatrix::from_fn(1, 1, 1, |_, _| Poly::var(1, 0))]).unwrap();
        let d = BialgebroidData::new(a, zero, nab).unwrap();
        let c = bialgebroid_check(&d).unwrap();
        assert!(c.v1.passed() && c.v2.passed(), "{c}");
    }

    #[test]
    fn candidate_pair_agrees() {
        // [e1, e2] = e2 on A, [ε¹, ε²] = ε¹ on A*
        let a = LieAlgebroid::lie_algebra(2, &[((0, 1), vec![rat(0), rat(1)])]).unwrap();
        let b = LieAlgebroid::lie_algebra(2, &[((0, 1), vec![rat(1), rat(0)])]).unwrap();
        let c = bialgebroid_check(&over_point(a, b)).unwrap();
        assert!(c.agree(), "{c}");
    }

    #[test]
    fn alternative_homotopy_formula() {
        // ⟨Φ_a(α), β⟩ = −d_{A*}a(α, β) + ⟨β, ∇_{ρ*α}a⟩ − ⟨α, ∇_{ρ*β}a⟩
        let mut g = Gen::new(31);
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)));
        let astar = Arc::new(LieAlgebroid::new(BaseChart::standard(2), PolyMatrix::from_ints(2, &[&[0, 1], &[0, 0]]), vec![]).unwrap());
        let nab = g.tm_connection(a.chart(), 2);
        let d = BialgebroidData::new(a.clone(), astar.clone(), nab.clone()).unwrap();
        let phi = d.homotopy().unwrap();
        for i in 0..2 {
            let e = a.frame(i);
            let ds = d.d_star(&e).unwrap();
            for l in 0..2 {
                for m in 0..2 {
                    let (al, be) = (astar.frame(m), astar.frame(l));
                    let x = nab.apply(&astar.anchor_field(&al), &e).unwrap();
                    let y = nab.apply(&astar.anchor_field(&be), &e).unwrap();
                    let alt = &(&(-ds.get(m, l).clone()) + &x[l]) - &y[m];
                    assert_eq!(phi.get(&[i]).get(l, m), &alt);
                }
            }
        }
    }

    /// Structure constants in the frame `f_i = Σ g_pi e_p` for unit upper
    /// triangular `g`, optionally scaled.
    fn change_basis(alg: &LieAlgebroid, g: &PolyMatrix, scale: i64) -> LieAlgebroid {
        let k = alg.rank();
        let n_mat = &PolyMatrix::identity(k, 0) - g;
        let mut inv = PolyMatrix::identity(k, 0);
        let mut pow = PolyMatrix::identity(k, 0);
        for _ in 1..k {
            pow = &pow * &n_mat;
            inv = &inv + &pow;
        }
        let mut upper = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                let br = alg.bracket(&g.column(i), &g.column(j)).unwrap();
                let c = inv.mul_vec(&br).into_iter().map(|p| p.scale_int(scale)).collect();
                upper.push(((i, j), c));
            }
        }
        LieAlgebroid::new(alg.chart().clone(), PolyMatrix::zeros(0, k, 0), upper).unwrap()
    }

    #[test]
    fn random_constant_pairs_agree() {
        let mut gen = Gen::new(32);
        let pool = [
            LieAlgebroid::so3(),
            LieAlgebroid::sl2(),
            LieAlgebroid::heisenberg(),
            LieAlgebroid::lie_algebra(3, &[]).unwrap(),
            LieAlgebroid::lie_algebra(3, &[((0, 1), vec![rat(0), rat(1), rat(0)]), ((0, 2), vec![rat(0), rat(0), rat(1)])]).unwrap(),
        ];
        let mut passes = [0usize; 2];
        for _ in 0..20 {
            let pick = |gen: &mut Gen| {
                let base = &pool[gen.below(pool.len())];
                let g = PolyMatrix::from_fn(3, 3, 0, |i, j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => Poly::one(0),
                    std::cmp::Ordering::Less if gen.coin(0.5) => Poly::from_int(0, gen.below(3) as i64 - 1),
                    _ => Poly::zero(0),
                });
                let s = gen.below(3) as i64;
                change_basis(base, &g, s)
            };
            let a = pick(&mut gen);
            let b = pick(&mut gen);
            let c = bialgebroid_check(&over_point(a, b)).unwrap();
            assert!(c.agree(), "{c}");
            passes[c.v1.passed() as usize] += 1;
        }
        assert!(passes[0] > 0 && passes[1] > 0, "{passes:?}");
    }

    #[test]
    fn poisson_plane_is_a_bialgebroid() {
        // π = x1 ∂1∧∂2: ρ*(dx1) = x1∂2, ρ*(dx2) = −x1∂1, [dx1, dx2]_π = dx1
        let chart = BaseChart::standard(2);
        let x = Poly::var(2, 0);
        let anchor = PolyMatrix::from_fn(2, 2, 2, |r, c| match (r, c) {
            (1, 0) => x.clone(),
            (0, 1) => -x.clone(),
            _ => Poly::zero(2),
        });
        let astar = Arc::new(LieAlgebroid::new(chart.clone(), anchor, vec![((0, 1), vec![Poly::one(2), Poly::zero(2)])]).unwrap());
        let a = Arc::new(LieAlgebroid::tangent(chart));
        let mut g = Gen::new(33);
        for _ in 0..3 {
            let nab = g.tm_connection(a.chart(), 2);
            let d = BialgebroidData::new(a.clone(), astar.clone(), nab).unwrap();
            let c = bialgebroid_check(&d).unwrap();
            assert!(c.v1.passed() && c.v2.passed(), "{c}");
        }
    }
}
