use super::total::{build_total_algebroid, scalar_function, scalar_one_form, total_differential, TotalAlgebroid};
use crate::algebroid::{algebroid_morphism_check, FormValued};
use crate::error::{dim_err, Result};
use crate::matrix::PolyMatrix;
use crate::poly::Poly;
use crate::rep2::{Rep2, RepMorphism};
use crate::report::{Comparison, Report};

/// A morphism of decomposed VB-algebroids over the identity of `M`:
/// `(a, b, c) ↦ (F_ver a, F_hor b, F_c c + Φ_a b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VBMorphismData {
    pub fver: PolyMatrix,
    pub fhor: PolyMatrix,
    pub fc: PolyMatrix,
    /// 1-form over `A` with `rank C′ × rank B` blocks.
    pub phi: FormValued,
}

impl VBMorphismData {
    pub fn identity(rep: &Rep2) -> Self {
        let n = rep.algebroid().dim();
        VBMorphismData {
            fver: PolyMatrix::identity(rep.algebroid().rank(), n),
            fhor: PolyMatrix::identity(rep.rank1(), n),
            fc: PolyMatrix::identity(rep.rank0(), n),
            phi: rep.zero_gauge(),
        }
    }

    fn check_shapes(&self, v: &Rep2, w: &Rep2) -> Result<()> {
        let (a, b) = (v.algebroid(), w.algebroid());
        if a.chart() != b.chart() {
            return Err(dim_err("vb morphism", "source and target live over different charts"));
        }
        let ok = self.fver.shape() == (b.rank(), a.rank())
            && self.fhor.shape() == (w.rank1(), v.rank1())
            && self.fc.shape() == (w.rank0(), v.rank0())
            && self.phi.rank() == a.rank()
            && self.phi.degree() == 1
            && self.phi.coeff_shape() == (w.rank0(), v.rank1());
        if ok {
            Ok(())
        } else {
            Err(dim_err("vb morphism", "F_ver, F_hor, F_c or Φ has the wrong shape"))
        }
    }

    /// The components as a morphism of representations over `F_ver`.
    pub fn rep_morphism(&self, v: &Rep2, w: &Rep2) -> Result<RepMorphism> {
        RepMorphism::new(v.clone(), w.clone(), self.fver.clone(), self.fc.clone(), self.fhor.clone(), self.phi.clone())
    }
}

/// `F*` on forms of the target total algebroid.
struct Pullback<'a> {
    t: &'a TotalAlgebroid,
    subs: Vec<Poly>,
    frame: PolyMatrix,
}

impl<'a> Pullback<'a> {
    fn new(f: &VBMorphismData, t: &'a TotalAlgebroid, t2: &TotalAlgebroid) -> Self {
        let nv = t.nvars();
        let mut subs: Vec<Poly> = (0..t.n).map(|j| Poly::var(nv, j)).collect();
        subs.extend(t.contract_b(&f.fhor));
        let mut frame = PolyMatrix::zeros(t2.rank(), t.rank(), nv);
        for i in 0..t.k {
            for q in 0..t2.k {
                frame.set(q, i, t.lift(f.fver.get(q, i)));
            }
            for (alpha, p) in t.contract_b(f.phi.get(&[i])).into_iter().enumerate() {
                frame.set(t2.c(alpha), i, p);
            }
        }
        for alpha in 0..t.rc {
            for gamma in 0..t2.rc {
                frame.set(t2.c(gamma), t.c(alpha), t.lift(f.fc.get(gamma, alpha)));
            }
        }
        Pullback { t, subs, frame }
    }

    fn apply(&self, w: &FormValued) -> Result<FormValued> {
        let nv = self.t.nvars();
        let mut moved = FormValued::zero(w.rank(), w.degree(), 1, 1, nv);
        for (tup, m) in w.components() {
            moved.set(tup, m.substitute(&self.subs, nv)?);
        }
        moved.pullback(&self.frame)
    }
}

/// Checks `F* ∘ d_{D′} = d_D ∘ F*` on the generators `x_j`, `b′_β` (linear
/// functions) and the dual frame `h′^q`, `ĉ′^α` of `D′`.
///
/// Generators suffice: `F*` is an algebra morphism and both differentials
/// are derivations, so agreement on generators propagates to products, and
/// every form is a polynomial combination of these generators.
pub fn vb_morphism_oracle(f: &VBMorphismData, v: &Rep2, w: &Rep2) -> Result<Report> {
    f.check_shapes(v, w)?;
    let t = build_total_algebroid(v)?;
    let t2 = build_total_algebroid(w)?;
    let pb = Pullback::new(f, &t, &t2);
    let nv2 = t2.nvars();
    let mut out = Report::new("vb_morphism_oracle");

    let commutator = |w: FormValued| -> Result<FormValued> {
        let lhs = pb.apply(&total_differential(&t2, &w)?)?;
        let rhs = total_differential(&t, &pb.apply(&w)?)?;
        lhs.checked_sub(&rhs)
    };
    let one_form_family = |tup: &[usize], hh: &'static str, hc: &'static str, cc: &'static str| match (t.kind(tup[0]), t.kind(tup[tup.len() - 1])) {
        ('h', 'h') => hh,
        ('h', _) => hc,
        _ => cc,
    };

    for j in 0..t.n {
        let r = commutator(scalar_function(&t2, Poly::var(nv2, j)))?;
        for (tup, m) in r.components() {
            out.push("anchor", &[j, tup[0]], m.clone());
        }
    }
    for beta in 0..t2.rb {
        let r = commutator(scalar_function(&t2, t2.b(beta)))?;
        for (tup, m) in r.components() {
            let fam = if t.kind(tup[0]) == 'h' { "hor_connection" } else { "chain_map" };
            out.push(fam, &[beta, tup[0]], m.clone());
        }
    }
    let unit = |idx: usize| -> Vec<Poly> { (0..t2.rank()).map(|q| if q == idx { Poly::one(nv2) } else { Poly::zero(nv2) }).collect() };
    for q in 0..t2.k {
        let r = commutator(scalar_one_form(&t2, unit(t2.h(q))))?;
        for (tup, m) in r.components() {
            let mut idx = vec![q];
            idx.extend(tup);
            out.push("bracket", &idx, m.clone());
        }
    }
    for alpha in 0..t2.rc {
        let r = commutator(scalar_one_form(&t2, unit(t2.c(alpha))))?;
        for (tup, m) in r.components() {
            let mut idx = vec![alpha];
            idx.extend(tup);
            out.push(one_form_family(tup, "homotopy", "core_connection", "core_core"), &idx, m.clone());
        }
    }
    Ok(out)
}

/// Compares "F_ver is an algebroid morphism and (F_c, F_hor, Φ) a
/// representation morphism" with the differential oracle.
pub fn theorem_main_check(f: &VBMorphismData, v: &Rep2, w: &Rep2) -> Result<Comparison> {
    f.check_shapes(v, w)?;
    let mut v1 = Report::new("algebroid_and_rep_morphism");
    v1.absorb("base", algebroid_morphism_check(&f.fver, v.algebroid(), w.algebroid())?);
    v1.absorb("rep", f.rep_morphism(v, w)?.residuals_unchecked()?);
    let v2 = vb_morphism_oracle(f, v, w)?;
    Ok(Comparison::new("theorem_main", v1, v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::{BaseChart, Connection, LieAlgebroid};
    use crate::random::Gen;
    use std::sync::Arc;

    fn curved_double() -> Rep2 {
        let a = Arc::new(LieAlgebroid::tangent(BaseChart::standard(2)));
        let mut g = PolyMatrix::zeros(2, 2, 2);
        g.set(1, 0, Poly::var(2, 1));
        Rep2::double(&Connection::new(a, 2, vec![g, PolyMatrix::zeros(2, 2, 2)]).unwrap()).unwrap()
    }

    #[test]
    fn identity_passes() {
        let r = curved_double();
        let c = theorem_main_check(&VBMorphismData::identity(&r), &r, &r).unwrap();
        assert!(c.v1.passed() && c.v2.passed(), "{c}");
    }

    #[test]
    fn gauge_data_passes_and_perturbation_fails_homotopy() {
        let r = curved_double();
        let mut phi = r.zero_gauge();
        phi.set(
            &[0],
            PolyMatrix::from_fn(2, 2, 2, |i, j| if (i, j) == (0, 1) { Poly::var(2, 0) } else { Poly::zero(2) }),
        );
        let g = r.gauge(&phi).unwrap();
        let mut f = VBMorphismData::identity(&r);
        f.phi = phi.clone();
        let c = theorem_main_check(&f, &g, &r).unwrap();
        assert!(c.v1.passed() && c.v2.passed(), "{c}");

        let mut bad = f.clone();
        let mut p = phi;
        p.set(&[1], PolyMatrix::from_ints(2, &[&[0, 0], &[1, 0]]));
        bad.phi = p;
        let c = theorem_main_check(&bad, &g, &r).unwrap();
        assert!(c.agree() && !c.v2.passed());
        assert!(c.v2.failing("homotopy"), "{c}");
    }

    #[test]
    fn zero_map_to_abelian_fails_anchor() {
        let r = curved_double();
        let ab = Arc::new(LieAlgebroid::new(BaseChart::standard(2), PolyMatrix::zeros(2, 1, 2), vec![]).unwrap());
        let w = Rep2::new(
            ab.clone(),
            PolyMatrix::zeros(0, 0, 2),
            Connection::flat(ab.clone(), 0),
            Connection::flat(ab, 0),
            FormValued::zero(1, 2, 0, 0, 2),
        )
        .unwrap();
        let f = VBMorphismData {
            fver: PolyMatrix::zeros(1, 2, 2),
            fhor: PolyMatrix::zeros(0, 2, 2),
            fc: PolyMatrix::zeros(0, 2, 2),
            phi: FormValued::zero(2, 1, 0, 2, 2),
        };
        let c = theorem_main_check(&f, &r, &w).unwrap();
        assert!(c.agree() && !c.v1.passed());
        assert!(c.v2.failing("anchor") && c.v1.failing("base.anchor"), "{c}");
    }

    #[test]
    fn random_self_maps_agree() {
        let mut g = Gen::new(5);
        let mut verdicts = [0usize; 2];
        for _ in 0..24 {
            let r = g.passing_rep();
            let a = r.algebroid();
            let n = a.dim();
            let mut f = VBMorphismData::identity(&r);
            match g.below(4) {
                0 => f.phi = g.gauge(&r),
                1 if a.rank() > 0 => f.fver = g.constant_matrix(a.rank(), a.rank()).extend_vars(n),
                1 | 2 => f.fhor = g.matrix(r.rank1(), r.rank1(), n),
                _ => f.fc = g.constant_matrix(r.rank0(), r.rank0()).extend_vars(n),
            }
            let target = if g.coin(0.5) { r.gauge(&f.phi).unwrap() } else { r.clone() };
            let c = theorem_main_check(&f, &r, &target).unwrap();
            assert!(c.agree(), "{c}");
            verdicts[c.v1.passed() as usize] += 1;
        }
        assert!(verdicts[0] > 0);
    }
}
