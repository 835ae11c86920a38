//! Cross-check of classifier verdicts against the matrix representation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classifier::{classify, FieldDescriptor, RingDescriptor, Verdict};
use crate::error::Error;
use crate::ultragraph::Ultragraph;

use super::algebra::{Element, GeneratorKind, MatrixAlgebra, Side, Subspace};
use super::rep::{build_representation, Representation};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub field: String,
    pub dimension: usize,
    pub block_sizes: Vec<usize>,
    pub rickart: Verdict,
    pub baer: Verdict,
    pub baer_star: Verdict,
    pub graded_baer: Verdict,
    pub graded_baer_star: Verdict,
    /// Sampled subsets; each yields one left and one right annihilator.
    pub subsets: usize,
    pub annihilators: usize,
    pub failures: Vec<String>,
    pub agree: bool,
}

impl OracleReport {
    pub fn summary(&self) -> String {
        let engine = if self.failures.is_empty() {
            "all sampled annihilators idempotent-generated".to_string()
        } else {
            format!(
                "{} sampled annihilators without the expected generator",
                self.failures.len()
            )
        };
        format!(
            "classifier: baer={}; engine: {} — {}",
            self.baer,
            engine,
            if self.agree { "AGREE" } else { "DISAGREE" }
        )
    }
}

struct Expectations {
    idempotent: bool,
    projection: bool,
    graded: bool,
    graded_projection: bool,
}

/// Every singleton of a generator image, every cell projection, and
/// `random_subsets` random subsets of one to three elements.
pub fn sample_subsets(rep: &Representation, random_subsets: usize, seed: u64) -> Vec<(String, Vec<Element>)> {
    let alg = &rep.algebra;
    let mut out: Vec<(String, Vec<Element>)> = rep
        .named_elements()
        .into_iter()
        .map(|(name, x)| (format!("{{{name}}}"), vec![x]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random_subsets {
        let k = rng.gen_range(1..=3);
        let xs = (0..k)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    alg.random_homogeneous(&mut rng, 0.3)
                } else {
                    alg.random_element(&mut rng, 0.3)
                }
            })
            .collect();
        out.push((format!("random #{i}"), xs));
    }
    out
}

fn check_annihilator(
    alg: &MatrixAlgebra,
    label: &str,
    ann: &Subspace,
    side: Side,
    homogeneous: bool,
    expect: &Expectations,
    failures: &mut Vec<String>,
) -> Result<(), Error> {
    let side_name = match side {
        Side::Left => "ann_l",
        Side::Right => "ann_r",
    };
    let mut want = vec![];
    if expect.idempotent {
        want.push((GeneratorKind::Idempotent, false));
    }
    if expect.projection {
        want.push((GeneratorKind::Projection, false));
    }
    if homogeneous && expect.graded {
        want.push((GeneratorKind::Idempotent, true));
    }
    if homogeneous && expect.graded_projection {
        want.push((GeneratorKind::Projection, true));
    }
    for (kind, graded) in want {
        if alg.generator(ann, side, kind, graded)?.is_none() {
            failures.push(format!(
                "{side_name}{label}: no {}{kind:?} generator",
                if graded { "degree-0 " } else { "" }
            ));
        }
    }
    Ok(())
}

pub fn cross_check(
    g: &Ultragraph,
    field: FieldDescriptor,
    random_subsets: usize,
    seed: u64,
) -> Result<OracleReport, Error> {
    let rep = build_representation(g, field)?;
    let report = classify(g, &RingDescriptor::new(vec![field])?)?;
    let alg = &rep.algebra;
    let expect = Expectations {
        idempotent: report.baer.verdict == Verdict::Yes,
        projection: report.baer_star.verdict == Verdict::Yes,
        graded: report.graded_baer.verdict == Verdict::Yes,
        graded_projection: report.graded_baer_star.verdict == Verdict::Yes,
    };
    let subsets = sample_subsets(&rep, random_subsets, seed);
    let mut failures = Vec::new();
    for (label, xs) in &subsets {
        let homogeneous = xs.iter().all(|x| alg.homogeneous_degree(x).is_some());
        let left = alg.left_annihilator(xs);
        check_annihilator(alg, label, &left, Side::Left, homogeneous, &expect, &mut failures)?;
        let right = alg.right_annihilator(xs);
        check_annihilator(alg, label, &right, Side::Right, homogeneous, &expect, &mut failures)?;
        // ann_l(X*) = ann_r(X)*
        let stars: Vec<Element> = xs.iter().map(|x| alg.involute(x)).collect();
        if alg.ideal_structure(&alg.left_annihilator(&stars), Side::Left)?
            != alg.ideal_structure(&right, Side::Right)?
        {
            failures.push(format!("{label}: ann_l(X*) ≠ ann_r(X)*"));
        }
    }
    let agree = failures.is_empty();
    Ok(OracleReport {
        field: field.to_string(),
        dimension: rep.dim(),
        block_sizes: rep.basis.sizes(),
        rickart: report.rickart.verdict,
        baer: report.baer.verdict,
        baer_star: report.baer_star.verdict,
        graded_baer: report.graded_baer.verdict,
        graded_baer_star: report.graded_baer_star.verdict,
        subsets: subsets.len(),
        annihilators: 2 * subsets.len(),
        failures,
        agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setalg::{Universe, UpSet};
    use crate::ultragraph::Edge;

    #[test]
    fn fork_agrees() {
        let g = Ultragraph::new(Universe::Finite(3), vec![Edge::new("e", 0, UpSet::finite([1, 2]))]);
        let r = cross_check(&g, FieldDescriptor::Rationals, 10, 0).unwrap();
        assert!(r.agree, "{:?}", r.failures);
        assert_eq!(
            r.summary(),
            "classifier: baer=Yes; engine: all sampled annihilators idempotent-generated — AGREE"
        );
    }
}
