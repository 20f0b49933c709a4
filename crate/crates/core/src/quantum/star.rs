//! Star-polygon rays in ℝ³: the Klyachko construction, its SOS certificate,
//! the transitivity-of-implication chain and Clifton's eight rays.

use std::f64::consts::PI;

use super::{born, joint_pair_measurement, ket3, require_odd, SosCertificate, SOS_TOL};
use crate::error::{Error, Result};
use crate::numkit::{eig_extrema, rank, vec3, ComplexMatrix, Ket, C64, STRUCT_TOL};

/// n unit rays with consecutive ones orthogonal:
/// l_a = (sin θ cos φ_a, sin θ sin φ_a, cos θ), φ_a = (n−1)πa/n, a = 1..n.
#[derive(Debug, Clone)]
pub struct StarPolygon {
    pub n: usize,
    pub theta: f64,
    pub phis: Vec<f64>,
    pub rays: Vec<[f64; 3]>,
}

impl StarPolygon {
    pub fn new(n: usize) -> Result<Self> {
        require_odd(n, 3)?;
        let c = (PI / n as f64).cos();
        let theta = (c / (1.0 + c)).sqrt().acos();
        let phis: Vec<f64> = (1..=n)
            .map(|a| (n - 1) as f64 * PI * a as f64 / n as f64)
            .collect();
        let rays = phis
            .iter()
            .map(|p| [theta.sin() * p.cos(), theta.sin() * p.sin(), theta.cos()])
            .collect();
        let sp = StarPolygon {
            n,
            theta,
            phis,
            rays,
        };
        let worst = (0..n)
            .map(|a| vec3::dot(sp.rays[a], sp.rays[(a + 1) % n]).abs())
            .fold(0.0, f64::max);
        if worst >= STRUCT_TOL {
            return Err(Error::verify(format!(
                "adjacent rays overlap by {worst:.3e}"
            )));
        }
        Ok(sp)
    }

    pub fn ket(&self, a: usize) -> Ket {
        ket3(self.rays[a])
    }

    pub fn projector(&self, a: usize) -> ComplexMatrix {
        self.ket(a).projector()
    }

    /// 2|l_a⟩⟨l_a| − 𝟙
    pub fn signed_observable(&self, a: usize) -> ComplexMatrix {
        &self.projector(a).scale_real(2.0) - &ComplexMatrix::identity(3)
    }

    /// The symmetry axis ψ₁ = ẑ.
    pub fn axis_state(&self) -> Ket {
        ket3([0.0, 0.0, 1.0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlyachkoValue {
    pub r: f64,
    pub s: f64,
    /// Born probability of anti-correlation for each adjacent pair.
    pub pair_anticorrelation: Vec<f64>,
}

/// 2cos(π/n)/(1+cos(π/n))
pub fn klyachko_closed_form(n: usize) -> f64 {
    let c = (PI / n as f64).cos();
    2.0 * c / (1.0 + c)
}

pub fn klyachko_value(n: usize) -> Result<KlyachkoValue> {
    if n == 3 {
        return Err(Error::arg(
            "n = 3 has no quantum violation: pairwise commuting projectors for three boxes are all \
             jointly diagonalizable, so the KS bound 2/3 holds",
        ));
    }
    require_odd(n, 5)?;
    let sp = StarPolygon::new(n)?;
    let psi = sp.axis_state();
    let mut pairs = Vec::with_capacity(n);
    for a in 0..n {
        let joint = joint_pair_measurement(&sp.projector(a), &sp.projector((a + 1) % n))?;
        pairs.push(born(&psi, &joint[1]) + born(&psi, &joint[2]));
    }
    let r = pairs.iter().sum::<f64>() / n as f64;
    let s = n as f64 - 2.0 * n as f64 * r;
    let closed = klyachko_closed_form(n);
    if (r - closed).abs() > 1e-10 {
        return Err(Error::verify(format!(
            "R_{n} = {r} but the closed form gives {closed}"
        )));
    }
    Ok(KlyachkoValue {
        r,
        s,
        pair_anticorrelation: pairs,
    })
}

/// Numerically check the sum-of-squares decomposition of
/// B_n − n(1 − 4c/(1+c))𝟙 with B_n = Σ X̄_a X̄_{a⊕1}, c = cos(π/n).
pub fn sos_certificate_klyachko(n: usize) -> Result<SosCertificate> {
    require_odd(n, 5)?;
    let sp = StarPolygon::new(n)?;
    let nf = n as f64;
    let id = ComplexMatrix::identity(3);
    let x: Vec<ComplexMatrix> = (0..n).map(|a| sp.signed_observable(a)).collect();
    let xx: Vec<ComplexMatrix> = (0..n).map(|a| &x[a] * &x[(a + 1) % n]).collect();
    let b_op = xx
        .iter()
        .fold(ComplexMatrix::zeros(3, 3), |acc, m| &acc + m);

    let c = (PI / nf).cos();
    let sec = 1.0 / c;
    let sec2h = 1.0 / (PI / (2.0 * nf)).cos().powi(2);
    let bound = nf * (1.0 - 4.0 * c / (1.0 + c));
    let lhs = &b_op - &id.scale_real(bound);

    let sum = |terms: Vec<ComplexMatrix>| {
        terms
            .into_iter()
            .fold(ComplexMatrix::zeros(3, 3), |acc, m| &acc + &m)
    };
    let mut rhs =
        sum((0..n).map(|a| &id - &(&x[a] * &x[a])).collect()).scale_real(0.25 * (2.0 - sec));
    rhs = &rhs + &sum((0..n).map(|a| &id - &(&xx[a] * &xx[a])).collect()).scale_real(0.25);
    rhs = &rhs
        + &sum((0..n)
            .map(|a| {
                let x1 = &x[(a + 1) % n];
                &(&x[a] * &x[(a + 2) % n]) * &(&id - &(x1 * x1))
            })
            .collect())
        .scale_real(0.25 * sec);
    let v0 = &id.scale_real(nf * (3.0 - 2.0 * sec2h)) + &b_op;
    rhs = &rhs + &(&v0.dagger() * &v0).scale_real((1.0 + sec) / (4.0 * nf));

    let omega = C64::from_polar(1.0, -2.0 * PI / nf);
    let mut min_coef = f64::INFINITY;
    for j in 1..=n {
        let jf = j as f64;
        let base = 1.0 + (2.0 * PI * jf / nf).cos() * sec;
        let l1 = base * (PI * jf / nf).sin().powi(2);
        let l2 = if j < n { 0.25 * base } else { 0.0 };
        min_coef = min_coef.min(l1).min(l2);
        let mut v1 = ComplexMatrix::zeros(3, 3);
        let mut v2 = ComplexMatrix::zeros(3, 3);
        for a in 0..n {
            let w = omega.powi((j * (a + 1)) as i32);
            v1 = &v1 + &x[a].scale(w);
            v2 = &v2 + &xx[a].scale(w);
        }
        rhs = &rhs + &(&v1.dagger() * &v1).scale_real(l1 / nf);
        rhs = &rhs + &(&v2.dagger() * &v2).scale_real(l2 / nf);
    }

    let residual = (&lhs - &rhs).frobenius_norm();
    let extremum = eig_extrema(&b_op)?.min;
    let passed =
        residual < SOS_TOL && min_coef >= -STRUCT_TOL && (extremum - bound).abs() < SOS_TOL;
    Ok(SosCertificate {
        n,
        residual,
        min_coefficient: min_coef,
        certified_bound: bound,
        extremum,
        passed,
    })
}

#[derive(Debug, Clone)]
pub struct TransitivityReport {
    pub psi2: Ket,
    /// p(X₁ = 1) on ψ₂.
    pub p_start: f64,
    /// p(X₃=1 | X₂=0) and p(X₅=1 | X₄=0) on ψ₂.
    pub conditionals: [f64; 2],
    pub implications_hold: bool,
}

fn plane_normal(sp: &StarPolygon, a: usize, b: usize) -> Result<[f64; 3]> {
    vec3::unit(vec3::cross(sp.rays[a], sp.rays[b])).ok_or_else(|| Error::verify("degenerate plane"))
}

/// The state on span{l₂,l₃} ∩ span{l₄,l₅} along which
/// X₁=1 ⇒ X₂=0 ⇒ X₃=1 ⇒ X₄=0 ⇒ X₅=1 ⇒ X₁=0 all hold with certainty.
pub fn transitivity_chain_klyachko() -> Result<TransitivityReport> {
    let sp = StarPolygon::new(5)?;
    let chi = plane_normal(&sp, 1, 2)?;
    let chi_p = plane_normal(&sp, 3, 4)?;
    let mut psi =
        vec3::unit(vec3::cross(chi, chi_p)).ok_or_else(|| Error::verify("planes coincide"))?;
    if vec3::dot(psi, sp.rays[0]) < 0.0 {
        psi = vec3::scale(psi, -1.0);
    }
    let psi2 = ket3(psi);
    let p_start = born(&psi2, &sp.projector(0));

    let mut conditionals = [0.0; 2];
    for (k, (a, b)) in [(1, 2), (3, 4)].into_iter().enumerate() {
        let joint = joint_pair_measurement(&sp.projector(a), &sp.projector(b))?;
        let p_a0 = born(&psi2, &joint[0]) + born(&psi2, &joint[1]);
        conditionals[k] = born(&psi2, &joint[1]) / p_a0;
    }
    // the other three links are orthogonality relations, state-independent
    let orth = [(0, 1), (2, 3), (4, 0)]
        .iter()
        .all(|&(a, b)| vec3::dot(sp.rays[a], sp.rays[b]).abs() < STRUCT_TOL);
    let implications_hold = orth && conditionals.iter().all(|c| (c - 1.0).abs() < 1e-10);
    Ok(TransitivityReport {
        psi2,
        p_start,
        conditionals,
        implications_hold,
    })
}

/// Rank of the stacked normals of the planes span{l₂,l₃}, span{l₄,l₅}, …,
/// span{l_{n−1},l_n}. Rank 3 means no common ray exists.
pub fn transitivity_chain_rank(n: usize) -> Result<usize> {
    require_odd(n, 5)?;
    let sp = StarPolygon::new(n)?;
    let normals: Vec<Vec<f64>> = (1..n)
        .step_by(2)
        .map(|a| plane_normal(&sp, a, a + 1).map(|v| v.to_vec()))
        .collect::<Result<_>>()?;
    Ok(rank(&normals, 1e-10))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliftonReport {
    pub names: Vec<&'static str>,
    /// Orthogonal pairs among the eight rays (indices into `names`).
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<[usize; 3]>,
    pub matches_figure: bool,
    pub valid_colorings: usize,
    pub colorings_with_l1_zero: usize,
    /// Colorings with v(ψ₂) = v(l₁) = 1 (the proof needs zero).
    pub colorings_psi2_and_l1: usize,
}

/// Rays l₁..l₅, χ ⊥ span{l₂,l₃}, χ′ ⊥ span{l₄,l₅}, ψ₂.
pub fn clifton_check() -> Result<CliftonReport> {
    let sp = StarPolygon::new(5)?;
    let chi = plane_normal(&sp, 1, 2)?;
    let chi_p = plane_normal(&sp, 3, 4)?;
    let psi2 = transitivity_chain_klyachko()?.psi2.real_parts();
    let mut rays: Vec<[f64; 3]> = sp.rays.clone();
    rays.push(chi);
    rays.push(chi_p);
    rays.push([psi2[0], psi2[1], psi2[2]]);
    let names = vec!["l1", "l2", "l3", "l4", "l5", "chi", "chi'", "psi2"];
    const L1: usize = 0;
    const PSI2: usize = 7;

    let mut edges = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            if vec3::dot(rays[i], rays[j]).abs() < 1e-10 {
                edges.push((i, j));
            }
        }
    }
    let expected = vec![
        (0, 1),
        (0, 4),
        (1, 2),
        (1, 5),
        (2, 3),
        (2, 5),
        (3, 4),
        (3, 6),
        (4, 6),
        (5, 7),
        (6, 7),
    ];
    let adj = |i: usize, j: usize| edges.contains(&(i.min(j), i.max(j)));
    let mut triangles = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            for k in j + 1..8 {
                if adj(i, j) && adj(j, k) && adj(i, k) {
                    triangles.push([i, j, k]);
                }
            }
        }
    }

    let mut report = CliftonReport {
        names,
        matches_figure: edges == expected,
        edges: edges.clone(),
        triangles: triangles.clone(),
        valid_colorings: 0,
        colorings_with_l1_zero: 0,
        colorings_psi2_and_l1: 0,
    };
    for v in 0u32..256 {
        let bit = |i: usize| (v >> i) & 1;
        let pairs_ok = edges.iter().all(|&(i, j)| bit(i) + bit(j) <= 1);
        let triples_ok = triangles
            .iter()
            .all(|t| t.iter().map(|&i| bit(i)).sum::<u32>() == 1);
        if pairs_ok && triples_ok {
            report.valid_colorings += 1;
            if bit(L1) == 0 {
                report.colorings_with_l1_zero += 1;
            }
            if bit(L1) == 1 && bit(PSI2) == 1 {
                report.colorings_psi2_and_l1 += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::inner_product;

    #[test]
    fn pentagram_geometry() {
        let sp = StarPolygon::new(5).unwrap();
        assert!((sp.theta.cos() - 5f64.powf(-0.25)).abs() < 1e-15);
        assert!(inner_product(&sp.ket(0), &sp.ket(1)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn klyachko_pentagram_value() {
        let v = klyachko_value(5).unwrap();
        assert!((v.r - 2.0 / 5f64.sqrt()).abs() < 1e-12);
        assert!((v.s - (5.0 - 4.0 * 5f64.sqrt())).abs() < 1e-12);
        assert!(v
            .pair_anticorrelation
            .iter()
            .all(|p| (p - 2.0 / 5f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn three_boxes_refused() {
        let e = klyachko_value(3).unwrap_err();
        assert!(e.to_string().contains("jointly diagonalizable"));
    }

    #[test]
    fn klyachko_certificate_n5() {
        let c = sos_certificate_klyachko(5).unwrap();
        assert!(c.passed, "{c:?}");
        assert!((c.extremum - (5.0 - 4.0 * 5f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn transitivity_start_probability() {
        let t = transitivity_chain_klyachko().unwrap();
        assert!((t.p_start - (1.0 - 2.0 / 5f64.sqrt())).abs() < 1e-12);
        assert!(t.implications_hold);
    }

    #[test]
    fn heptagram_planes_share_no_ray() {
        assert_eq!(transitivity_chain_rank(7).unwrap(), 3);
        assert_eq!(transitivity_chain_rank(5).unwrap(), 2);
    }

    #[test]
    fn clifton_graph_and_colorings() {
        let c = clifton_check().unwrap();
        assert!(c.matches_figure, "{:?}", c.edges);
        assert_eq!(c.edges.len(), 11);
        assert_eq!(c.triangles, vec![[1, 2, 5], [3, 4, 6]]);
        assert_eq!(c.colorings_psi2_and_l1, 0);
        assert!(c.colorings_with_l1_zero > 0);
    }
}
