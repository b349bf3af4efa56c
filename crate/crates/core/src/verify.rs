//! End-to-end check suite for one width, as run by `s2det verify`.
//!
//! Widths 1 to 3 get the full suite. Width 4 only runs in best-effort mode:
//! the sign table is attempted under the node budget, and the checks that
//! need it are skipped when it cannot be built. Table-free checks (LIM
//! algebra, S2-LU, back-substitution, support-pruned triangular monomials, bounded
//! involution-graph exploration) run regardless.

use rand::Rng;
use serde::Serialize;

use crate::combinat::{
    edge_count, enumerate_restricted, involution, involution_exhaustive, partition_of_e, triangles,
    EdgeDPartition, EdgePair, EnumConfig,
};
use crate::dets2::{det_s2_upper_fast, monomial, DetEvaluator};
use crate::error::{Error, Result};
use crate::leg_algebra::{
    leg_submatrices, lim_multiply, parametric_back_substitution, s2_lu, LegDecomposition,
};
use crate::matrix::{identity_e, ind_of, is_s2_lower, is_s2_upper, s2_diagonal, S2Matrix};
use crate::sample;
use crate::signmap::{build_sign_table, explore_sign_orbit, seed_sign, SignTable};
use crate::Rational;

/// `|P^{h,cf}_d(K_{2d})|` for the widths where it has been computed.
pub const KNOWN_COUNTS: [(usize, usize); 3] = [(1, 1), (2, 12), (3, 66240)];

/// Largest width [`run`] accepts without best-effort mode.
pub const MAX_FULL_WIDTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableFacts {
    pub size: usize,
    pub consistent: bool,
    pub connected: bool,
    pub orbit_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub d: usize,
    pub table: Option<TableFacts>,
    pub checks: Vec<Check>,
}

impl Report {
    /// No check failed. Skipped checks do not count as failures.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Random instances per randomized check.
    pub trials: usize,
    pub seed: u64,
    pub enumeration: EnumConfig,
    /// Allow `d = 4`.
    pub best_effort: bool,
    /// Partitions visited by the bounded orbit walk in best-effort mode.
    pub orbit_limit: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            enumeration: EnumConfig::from_env(),
            best_effort: false,
            orbit_limit: 200_000,
        }
    }
}

fn check(name: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    let status = if ok { Status::Pass } else { Status::Fail };
    Check {
        name,
        status,
        detail: detail.into(),
    }
}

fn skipped(name: &'static str, detail: impl Into<String>) -> Check {
    Check {
        name,
        status: Status::Skipped,
        detail: detail.into(),
    }
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Runs the suite for width `d`.
pub fn run(d: usize, cfg: &VerifyConfig) -> Result<Report> {
    if d == 0 {
        return Err(Error::InvalidWidth(d));
    }
    let max = if cfg.best_effort {
        crate::combinat::MAX_ENUM_WIDTH
    } else {
        MAX_FULL_WIDTH
    };
    if d > max {
        return Err(Error::WidthTooLarge { d, max });
    }
    let mut rng = sample::rng(cfg.seed ^ ((d as u64) << 32));
    let mut checks = Vec::new();

    let table = match build_sign_table(d, &cfg.enumeration) {
        Ok(t) => Some(t),
        Err(e @ Error::NodeBudgetExceeded { .. }) if cfg.best_effort => {
            checks.push(skipped("sign_table", e.to_string()));
            None
        }
        Err(e) => return Err(e),
    };
    let facts = table.as_ref().map(|t| TableFacts {
        size: t.len(),
        consistent: t.consistent(),
        connected: t.connected(),
        orbit_count: t.orbit_count(),
    });

    match &table {
        Some(t) => table_checks(t, cfg, &mut rng, &mut checks)?,
        None => {
            for name in [
                "identity_det",
                "vanishing",
                "triangular_det",
                "multilinearity",
            ] {
                checks.push(skipped(name, "needs the sign table"));
            }
            let walk = explore_sign_orbit(d, cfg.orbit_limit)?;
            checks.push(check(
                "orbit_exploration",
                walk.conflicts == 0,
                format!(
                    "visited {} partitions, {} involution edges, {} conflicts, exhausted: {}",
                    walk.visited, walk.edges_checked, walk.conflicts, walk.exhausted
                ),
            ));
        }
    }

    checks.push(triangular_monomials_pruned(d, &cfg.enumeration)?);
    checks.push(involution_walk(d, cfg.trials, &mut rng)?);
    checks.extend(algebra_checks(d, cfg.trials, &mut rng)?);
    Ok(Report {
        d,
        table: facts,
        checks,
    })
}

fn table_checks(
    t: &SignTable,
    cfg: &VerifyConfig,
    rng: &mut impl Rng,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let d = t.d();
    let seed = seed_sign(d);
    let e = partition_of_e(d);

    if let Some(&(_, n)) = KNOWN_COUNTS.iter().find(|(k, _)| *k == d) {
        checks.push(check(
            "partition_count",
            t.len() == n,
            format!("{} partitions, expected {n}", t.len()),
        ));
    }
    checks.push(check(
        "sign_table",
        t.consistent() && t.connected() && t.epsilon(&e)? == seed,
        format!(
            "consistent: {}, connected: {}, epsilon(E) = {}",
            t.consistent(),
            t.connected(),
            t.epsilon(&e)?
        ),
    ));

    let mut flips = 0;
    let mut bad = 0;
    for (p, s) in t.entries() {
        for (x, y, z) in triangles(d) {
            flips += 1;
            if t.epsilon(&involution(p, x, y, z)?)? != -s {
                bad += 1;
            }
        }
    }
    checks.push(check(
        "sign_flip",
        bad == 0,
        format!("{flips} (partition, triangle) pairs, {bad} without a flip"),
    ));

    let ev = DetEvaluator::new(t);
    let id = ev.evaluate_rational(&identity_e(d))?.value;
    checks.push(check(
        "identity_det",
        id == q(seed as i64),
        format!("det(E) = {id}"),
    ));

    let mut nonzero = 0;
    let trials = if d == 1 { 0 } else { cfg.trials };
    for _ in 0..trials {
        let (a, _) = sample::matrix_with_equal_triangle(rng, d);
        if ev.evaluate_rational(&a)?.value != q(0) {
            nonzero += 1;
        }
    }
    checks.push(check(
        "vanishing",
        nonzero == 0,
        format!("{trials} matrices with equal triangle columns, {nonzero} nonzero"),
    ));

    let mut mismatches = 0;
    for k in 0..2 * cfg.trials {
        let a = if k % 2 == 0 {
            sample::upper(rng, d, false)
        } else {
            sample::lower(rng, d, false)
        };
        if ev.evaluate_rational(&a)?.value != det_s2_upper_fast(&a)? {
            mismatches += 1;
        }
    }
    checks.push(check(
        "triangular_det",
        mismatches == 0,
        format!(
            "{} upper and {} lower matrices, {mismatches} mismatches",
            cfg.trials, cfg.trials
        ),
    ));

    let mut bad = 0;
    for _ in 0..cfg.trials {
        let a = sample::matrix(rng, d);
        let col = rng.gen_range(0..edge_count(d));
        let (alpha, beta) = (sample::rational(rng), sample::rational(rng));
        let (u, w) = (sample::vector(rng, d), sample::vector(rng, d));
        let mix: Vec<Rational> = u
            .iter()
            .zip(&w)
            .map(|(x, y)| &alpha * x + &beta * y)
            .collect();
        let with = |v: &[Rational]| -> Result<Rational> {
            let mut m = a.clone();
            m.set_column(col, v);
            Ok(ev.evaluate_rational(&m)?.value)
        };
        if with(&mix)? != &alpha * with(&u)? + &beta * with(&w)? {
            bad += 1;
        }
    }
    checks.push(check(
        "multilinearity",
        bad == 0,
        format!("{} probes, {bad} failures", cfg.trials),
    ));

    // For a generic S2-upper matrix only the twin-star monomial survives.
    let mut survivors = 0;
    for _ in 0..cfg.trials.min(10) {
        let a = S2Matrix::from_fn(d, |r, c| {
            if r < ind_of(EdgePair::from_index(d, c)) {
                sample::nonzero_rational(rng)
            } else {
                q(0)
            }
        });
        for (p, _) in t.entries() {
            if *p != e && monomial(p, &a)? != q(0) {
                survivors += 1;
            }
        }
    }
    checks.push(check(
        "triangular_monomials",
        survivors == 0,
        format!("{survivors} nonzero monomials besides the twin-star one"),
    ));
    Ok(())
}

/// Partitions whose monomial can be nonzero on some S2-upper (resp. lower)
/// matrix are those with `color(e) <= ind(e)` (resp. `>=`); only the twin-star
/// partition qualifies.
fn triangular_monomials_pruned(d: usize, cfg: &EnumConfig) -> Result<Check> {
    let upper = enumerate_restricted(d, |e, c| c <= ind_of(e), cfg)?;
    let lower = enumerate_restricted(d, |e, c| c >= ind_of(e), cfg)?;
    let only_e = |v: &[EdgeDPartition]| v.len() == 1 && v[0] == partition_of_e(d);
    Ok(check(
        "triangular_monomials_pruned",
        only_e(&upper) && only_e(&lower),
        format!(
            "{} upper-supported, {} lower-supported partitions",
            upper.len(),
            lower.len()
        ),
    ))
}

/// Random walk along involutions from the twin-star partition, comparing the
/// restricted involution search against the exhaustive one at every step.
fn involution_walk(d: usize, steps: usize, rng: &mut impl Rng) -> Result<Check> {
    if d == 1 {
        return Ok(skipped("involution_unique", "K_2 has no triangles"));
    }
    let tris: Vec<_> = triangles(d).collect();
    let mut p = partition_of_e(d);
    let mut disagreements = 0;
    for _ in 0..steps {
        let (x, y, z) = tris[rng.gen_range(0..tris.len())];
        let fast = involution(&p, x, y, z)?;
        if involution_exhaustive(&p, x, y, z)? != fast {
            disagreements += 1;
        }
        p = fast;
    }
    Ok(check(
        "involution_unique",
        disagreements == 0,
        format!("{steps} steps, {disagreements} disagreements with the exhaustive search"),
    ))
}

fn algebra_checks(d: usize, trials: usize, rng: &mut impl Rng) -> Result<Vec<Check>> {
    let id = identity_e::<Rational>(d);
    let mut out = Vec::new();

    let (mut unit, mut assoc, mut bilinear, mut blockwise) = (0, 0, 0, 0);
    for _ in 0..trials {
        let (a, b, c) = (
            sample::matrix(rng, d),
            sample::matrix(rng, d),
            sample::matrix(rng, d),
        );
        if lim_multiply(&id, &a)? != a || lim_multiply(&a, &id)? != a {
            unit += 1;
        }
        if lim_multiply(&lim_multiply(&a, &b)?, &c)? != lim_multiply(&a, &lim_multiply(&b, &c)?)? {
            assoc += 1;
        }
        let (s, t) = (sample::rational(rng), sample::rational(rng));
        let combo = a.scale(&s).add(&b.scale(&t))?;
        let left = lim_multiply(&combo, &c)?;
        let right = lim_multiply(&c, &combo)?;
        if left
            != lim_multiply(&a, &c)?
                .scale(&s)
                .add(&lim_multiply(&b, &c)?.scale(&t))?
            || right
                != lim_multiply(&c, &a)?
                    .scale(&s)
                    .add(&lim_multiply(&c, &b)?.scale(&t))?
        {
            bilinear += 1;
        }
        let (da, db) = (leg_submatrices(&a), leg_submatrices(&b));
        let expected = LegDecomposition {
            d,
            center: da.center.mul(&db.center)?,
            left: da
                .left
                .iter()
                .zip(&db.left)
                .map(|(x, y)| x.mul(y))
                .collect::<Result<_>>()?,
            right: da
                .right
                .iter()
                .zip(&db.right)
                .map(|(x, y)| x.mul(y))
                .collect::<Result<_>>()?,
        };
        if leg_submatrices(&lim_multiply(&a, &b)?) != expected {
            blockwise += 1;
        }
    }
    out.push(check(
        "lim_unit",
        unit == 0,
        format!("{trials} matrices, {unit} failures"),
    ));
    out.push(check(
        "lim_associative",
        assoc == 0,
        format!("{trials} triples, {assoc} failures"),
    ));
    out.push(check(
        "lim_bilinear",
        bilinear == 0,
        format!("{trials} triples, {bilinear} failures"),
    ));
    out.push(check(
        "lim_blockwise",
        blockwise == 0,
        format!("{trials} pairs, {blockwise} failures"),
    ));

    let mut closure = 0;
    for _ in 0..trials {
        let (u1, u2) = (sample::upper(rng, d, false), sample::upper(rng, d, false));
        let (l1, l2) = (sample::lower(rng, d, false), sample::lower(rng, d, false));
        if !is_s2_upper(&lim_multiply(&u1, &u2)?) || !is_s2_lower(&lim_multiply(&l1, &l2)?) {
            closure += 1;
        }
    }
    out.push(check(
        "lim_closure",
        closure == 0,
        format!("{trials} upper and lower pairs, {closure} failures"),
    ));

    let (mut lu_bad, mut regenerated) = (0, 0);
    for _ in 0..trials {
        let (a, (l, u)) = loop {
            let a = sample::matrix(rng, d);
            match s2_lu(&a) {
                Ok(f) => break (a, f),
                Err(Error::LegZeroPivot { .. }) => regenerated += 1,
                Err(e) => return Err(e),
            }
        };
        let unit_diag = s2_diagonal(&l).values.iter().all(|v| *v == q(1));
        if !is_s2_lower(&l) || !unit_diag || !is_s2_upper(&u) || lim_multiply(&l, &u)? != a {
            lu_bad += 1;
        }
    }
    out.push(check(
        "s2_lu",
        lu_bad == 0,
        format!(
            "{trials} matrices ({regenerated} regenerated for a zero pivot), {lu_bad} failures"
        ),
    ));

    let mut residual = 0;
    for _ in 0..trials {
        let a = sample::upper(rng, d, true);
        let b = sample::vector(rng, d);
        let sol = parametric_back_substitution(&a, &b)?;
        let x = sol.complete(&sample::vector(rng, edge_count(d)));
        if a.apply(&x)? != b {
            residual += 1;
        }
    }
    out.push(check(
        "back_substitution",
        residual == 0,
        format!("{trials} systems, {residual} nonzero residuals"),
    ));
    Ok(out)
}
