//! Randomized verification of the spin constructions.

use rand::Rng;
use serde_json::json;

use crate::error::Result;
use crate::linalg::{self, c, ComplexMatrix};
use crate::report::{verdict_from_witnesses, Subject, Verdict, VerificationReport};
use crate::spin::{self, Construction, Direction, HalfInt, SpinSystem};

pub const RESIDUAL_TOL: f64 = 1e-9;
pub const OVERLAP_EPS: f64 = 1e-9;
pub const COMMUTATOR_TOL: f64 = 1e-11;
pub const CASIMIR_TOL: f64 = 1e-10;
pub const GRAM_TOL: f64 = 1e-9;
/// Minimum angle between directions compared for distinctness.
pub const MIN_SEPARATION: f64 = 1e-3;

/// `j ∈ {½, 1, …, 3}`
pub fn default_spins() -> Vec<SpinSystem> {
    (1..=6).map(|t| SpinSystem::new(HalfInt::from_twice(t)).expect("valid spin")).collect()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AlgebraDeviations {
    pub commutator: f64,
    pub casimir: f64,
}

/// Operator-norm deviations of `[J_x,J_y] = iJ_z` (cyclic) and
/// `J² = j(j+1)I`.
pub fn algebra_deviations(sys: &SpinSystem) -> Result<AlgebraDeviations> {
    let ops = spin::angular_momentum_operators(sys);
    let i = c(0.0, 1.0);
    let triples = [(&ops.jx, &ops.jy, &ops.jz), (&ops.jy, &ops.jz, &ops.jx), (&ops.jz, &ops.jx, &ops.jy)];
    let mut commutator: f64 = 0.0;
    for (a, b, target) in triples {
        let dev = linalg::commutator(a, b)?.sub(&target.scale(i))?.op_norm();
        commutator = commutator.max(dev);
    }
    let j = sys.j().value();
    let casimir = ops
        .casimir()
        .sub(&ComplexMatrix::identity(sys.dim()).scale(c(j * (j + 1.0), 0.0)))?
        .op_norm();
    Ok(AlgebraDeviations { commutator, casimir })
}

/// Recursion states against the diagonalization oracle, plus the algebra
/// checks, for `directions` random directions per spin.
pub fn verify_prop1<R: Rng + ?Sized>(spins: &[SpinSystem], directions: usize, rng: &mut R) -> Result<VerificationReport> {
    let mut b = VerificationReport::builder(Subject::Prop1);
    let mut worst_residual: f64 = 0.0;
    let mut worst_deficit: f64 = 0.0;
    let mut worst_algebra = AlgebraDeviations::default();
    let mut states = 0usize;
    let mut two_sided = 0usize;
    for sys in spins {
        let alg = algebra_deviations(sys)?;
        worst_algebra.commutator = worst_algebra.commutator.max(alg.commutator);
        worst_algebra.casimir = worst_algebra.casimir.max(alg.casimir);
        if alg.commutator > COMMUTATOR_TOL || alg.casimir > CASIMIR_TOL {
            b.witness(json!({
                "check": "algebra",
                "j": sys.j(),
                "commutator": alg.commutator,
                "casimir": alg.casimir,
            }));
        }
        for _ in 0..directions {
            let a = Direction::random(rng);
            for h in sys.m_values() {
                states += 1;
                let (s, info) = spin::eigenstate_recursion_with_info(sys, &a, h)?;
                if info.construction == Construction::TwoSided {
                    two_sided += 1;
                }
                let oracle = spin::eigenstate_oracle(sys, &a, h)?;
                let deficit = (1.0 - linalg::inner(&s.ket, &oracle.ket)?.norm()).max(0.0);
                worst_residual = worst_residual.max(info.residual);
                worst_deficit = worst_deficit.max(deficit);
                if info.residual > RESIDUAL_TOL || !linalg::phase_equal(&s.ket, &oracle.ket, OVERLAP_EPS)? {
                    b.witness(json!({
                        "check": "eigenstate",
                        "j": sys.j(),
                        "direction": a,
                        "h": h,
                        "residual": info.residual,
                        "overlap_deficit": deficit,
                    }));
                }
            }
        }
    }
    b.metric("spins", spins.len() as f64)
        .metric("directions_per_spin", directions as f64)
        .metric("states", states as f64)
        .metric("max_residual", worst_residual)
        .metric("max_overlap_deficit", worst_deficit)
        .metric("max_commutator_deviation", worst_algebra.commutator)
        .metric("max_casimir_deviation", worst_algebra.casimir)
        .metric("two_sided_constructions", two_sided as f64);
    let verdict = verdict_from_witnesses(&b);
    Ok(b.finish(verdict))
}

/// Per-direction completeness, the antipodal ray collision
/// `|a;h⟩ ~ |−a;−h⟩`, and distinctness of all other sampled pairs.
pub fn verify_cor1<R: Rng + ?Sized>(
    spins: &[SpinSystem],
    directions: usize,
    collision_samples: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut b = VerificationReport::builder(Subject::Cor1);
    let mut worst_gram: f64 = 0.0;
    for sys in spins {
        for _ in 0..directions {
            let a = Direction::random(rng);
            let kets: Vec<_> = spin::state_catalog(sys, &[a])?.into_iter().map(|s| s.ket).collect();
            let dev = linalg::orthonormality_deviation(&kets)?;
            worst_gram = worst_gram.max(dev);
            if dev > GRAM_TOL {
                b.witness(json!({ "check": "completeness", "j": sys.j(), "direction": a, "deviation": dev }));
            }
        }
    }

    // Antipodal pairs, across j ≤ 2.
    let small: Vec<&SpinSystem> = spins.iter().filter(|s| s.j().twice() <= 4).collect();
    let mut collisions = 0usize;
    let mut worst_collision_deficit: f64 = 0.0;
    let mut distinct_pairs = 0usize;
    let mut min_distinct_deficit = f64::INFINITY;
    for n in 0..collision_samples {
        let Some(&sys) = small.get(n % small.len().max(1)) else { break };
        let dim = sys.dim();
        let a = Direction::random(rng);
        let h = HalfInt::from_twice(sys.j().twice() - 2 * rng.random_range(0..dim) as i32);
        let s = spin::eigenstate_recursion(sys, &a, h)?;
        let t = spin::eigenstate_recursion(sys, &a.neg(), h.neg())?;
        let deficit = (1.0 - linalg::inner(&s.ket, &t.ket)?.norm()).max(0.0);
        worst_collision_deficit = worst_collision_deficit.max(deficit);
        if linalg::phase_equal(&s.ket, &t.ket, OVERLAP_EPS)? {
            collisions += 1;
        } else {
            b.witness(json!({ "check": "antipodal_collision_missing", "j": sys.j(), "direction": a, "h": h }));
        }

        // A direction at the minimum separation, and an unrelated one.
        let near = rotate_towards(&a, &Direction::random(rng), MIN_SEPARATION);
        for other in [near, Direction::random(rng)] {
            if a.angle_to(&other) < MIN_SEPARATION * (1.0 - 1e-9)
                || a.neg().angle_to(&other) < MIN_SEPARATION * (1.0 - 1e-9)
            {
                continue;
            }
            for k in sys.m_values() {
                let u = spin::eigenstate_recursion(sys, &other, k)?;
                distinct_pairs += 1;
                let deficit = 1.0 - linalg::inner(&s.ket, &u.ket)?.norm();
                min_distinct_deficit = min_distinct_deficit.min(deficit);
                if linalg::phase_equal(&s.ket, &u.ket, OVERLAP_EPS)? {
                    b.witness(json!({
                        "check": "distinct_rays_coincide",
                        "j": sys.j(),
                        "first": { "direction": a, "h": h },
                        "second": { "direction": other, "h": k },
                    }));
                }
            }
        }
        // Same direction, different answers.
        for k in sys.m_values().filter(|&k| k != h) {
            let u = spin::eigenstate_recursion(sys, &a, k)?;
            distinct_pairs += 1;
            min_distinct_deficit = min_distinct_deficit.min(1.0 - linalg::inner(&s.ket, &u.ket)?.norm());
        }
    }
    if !min_distinct_deficit.is_finite() {
        min_distinct_deficit = 0.0;
    }

    b.metric("max_gram_deviation", worst_gram)
        .metric("antipodal_samples", collision_samples as f64)
        .metric("antipodal_collisions", collisions as f64)
        .metric("max_antipodal_overlap_deficit", worst_collision_deficit)
        .metric("distinct_pairs_checked", distinct_pairs as f64)
        .metric("min_distinct_overlap_deficit", min_distinct_deficit)
        .metric("min_separation", MIN_SEPARATION);
    b.note(
        "(a, h) and (-a, -h) give the same ray because J_{-a} = -J_a; distinctness holds for every other \
         sampled pair, so the claim holds modulo this identification",
    );
    let verdict = verdict_from_witnesses(&b);
    Ok(b.finish(verdict))
}

/// The unit vector at angle `angle` from `a` in the plane of `a` and `towards`.
fn rotate_towards(a: &Direction, towards: &Direction, angle: f64) -> Direction {
    let [ax, ay, az] = a.components();
    let [bx, by, bz] = towards.components();
    let dot = a.dot(towards);
    let mut p = [bx - dot * ax, by - dot * ay, bz - dot * az];
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if norm < 1e-6 {
        // Pick any perpendicular.
        p = if ax.abs() < 0.9 { [0.0, -az, ay] } else { [-ay, ax, 0.0] };
    }
    let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    let (s, co) = angle.sin_cos();
    Direction::normalize_near_unit(
        co * ax + s * p[0] / norm,
        co * ay + s * p[1] / norm,
        co * az + s * p[2] / norm,
        1e-9,
    )
    .expect("rotation of a unit vector")
}

/// States indexed by `h`, `a₁`, `a₂` and the sign of `a₃`: rebuilding the
/// direction from those reproduces each state.
pub fn verify_cor2<R: Rng + ?Sized>(spins: &[SpinSystem], directions: usize, rng: &mut R) -> Result<VerificationReport> {
    let mut b = VerificationReport::builder(Subject::Cor2);
    let mut entries = 0usize;
    let mut worst_residual: f64 = 0.0;
    let mut worst_deficit: f64 = 0.0;
    for sys in spins {
        let dirs: Vec<Direction> = (0..directions).map(|_| Direction::random(rng)).collect();
        let catalog = spin::state_catalog(sys, &dirs)?;
        if catalog.len() != sys.dim() * dirs.len() {
            b.witness(json!({ "check": "catalog_size", "j": sys.j(), "entries": catalog.len() }));
        }
        for s in &catalog {
            entries += 1;
            let op = spin::component_operator(sys, &s.direction);
            let residual = op.mul_vec(&s.ket)?.sub(&s.ket.scale(c(s.answer.value(), 0.0)))?.norm();
            worst_residual = worst_residual.max(residual);

            let [a1, a2, a3] = s.direction.components();
            let rebuilt_a3 = (1.0 - a1 * a1 - a2 * a2).max(0.0).sqrt().copysign(a3);
            let rebuilt = Direction::normalize_near_unit(a1, a2, rebuilt_a3, 1e-9)?;
            let t = spin::eigenstate_recursion(sys, &rebuilt, s.answer)?;
            let deficit = (1.0 - linalg::inner(&s.ket, &t.ket)?.norm()).max(0.0);
            worst_deficit = worst_deficit.max(deficit);
            if residual > RESIDUAL_TOL || !linalg::phase_equal(&s.ket, &t.ket, OVERLAP_EPS)? {
                b.witness(json!({
                    "check": "parametrization",
                    "j": sys.j(),
                    "direction": s.direction,
                    "h": s.answer,
                    "residual": residual,
                    "overlap_deficit": deficit,
                }));
            }
        }
    }
    b.metric("entries", entries as f64)
        .metric("max_residual", worst_residual)
        .metric("max_reparametrization_deficit", worst_deficit);
    let verdict = if b.witness_count() == 0 { Verdict::Pass } else { Verdict::Fail };
    Ok(b.finish(verdict))
}
