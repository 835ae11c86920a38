//! Rickart and Baer verdicts for `L_R(𝒢)` read off the ultragraph.

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::paths::{self, ComponentKind, ExitWitness, Path};
use crate::setalg::MembershipCertificate;
use crate::ultragraph::{RowFiniteWitness, Ultragraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldDescriptor {
    Rationals,
    PrimeField(u64),
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl FieldDescriptor {
    pub fn prime_field(p: u64) -> Result<Self, Error> {
        if is_prime(p) {
            Ok(FieldDescriptor::PrimeField(p))
        } else {
            Err(Error::InvalidInput(format!("{p} is not prime")))
        }
    }

    pub fn positive_definite(&self) -> bool {
        self.square_sum_witness().is_none()
    }

    /// Shortest list of nonzero elements whose squares sum to zero, least
    /// lexicographically among those. Over a prime field one always exists
    /// with at most three entries.
    pub fn square_sum_witness(&self) -> Option<Vec<u64>> {
        let p = match *self {
            FieldDescriptor::Rationals => return None,
            FieldDescriptor::PrimeField(p) => p,
        };
        let sq = |x: u64| x * x % p;
        for a in 1..p {
            for b in a..p {
                if (sq(a) + sq(b)) % p == 0 {
                    return Some(vec![a, b]);
                }
            }
        }
        for a in 1..p {
            for b in a..p {
                for c in b..p {
                    if (sq(a) + sq(b) + sq(c)) % p == 0 {
                        return Some(vec![a, b, c]);
                    }
                }
            }
        }
        unreachable!("-1 is a sum of two squares mod every prime")
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// A commutative semisimple ring as a product of fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RingDescriptor {
    pub factors: Vec<FieldDescriptor>,
}

impl Default for RingDescriptor {
    fn default() -> Self {
        RingDescriptor {
            factors: vec![FieldDescriptor::Rationals],
        }
    }
}

impl RingDescriptor {
    pub fn new(factors: Vec<FieldDescriptor>) -> Result<Self, Error> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("a ring needs at least one factor".into()));
        }
        Ok(RingDescriptor { factors })
    }

    pub fn positive_definite(&self) -> bool {
        self.factors.iter().all(FieldDescriptor::positive_definite)
    }

    /// The first factor that is not positive definite, with its witness.
    pub fn square_sum_witness(&self) -> Option<(FieldDescriptor, Vec<u64>)> {
        self.factors
            .iter()
            .find_map(|f| f.square_sum_witness().map(|w| (*f, w)))
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    NotDetermined,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Yes => "Yes",
            Verdict::No => "No",
            Verdict::NotDetermined => "NotDetermined",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub verdict: Verdict,
    pub citation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Entry {
    fn new(verdict: Verdict, citation: &str, witness: Option<Value>) -> Self {
        Entry {
            verdict,
            citation: citation.to_string(),
            witness,
        }
    }
}

/// Field order is the report's key order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub unital: Entry,
    pub locally_rickart: Entry,
    pub graded_locally_rickart: Entry,
    pub graded_locally_rickart_star: Entry,
    pub rickart: Entry,
    pub graded_rickart: Entry,
    pub graded_rickart_star: Entry,
    pub locally_baer: Entry,
    pub graded_locally_baer: Entry,
    pub graded_locally_baer_star: Entry,
    pub baer: Entry,
    pub graded_baer: Entry,
    pub graded_baer_star: Entry,
    pub locally_baer_star: Entry,
    pub baer_star: Entry,
    pub positive_definite: Entry,
}

impl PropertyReport {
    pub fn entries(&self) -> [(&'static str, &Entry); 16] {
        [
            ("unital", &self.unital),
            ("locally_rickart", &self.locally_rickart),
            ("graded_locally_rickart", &self.graded_locally_rickart),
            ("graded_locally_rickart_star", &self.graded_locally_rickart_star),
            ("rickart", &self.rickart),
            ("graded_rickart", &self.graded_rickart),
            ("graded_rickart_star", &self.graded_rickart_star),
            ("locally_baer", &self.locally_baer),
            ("graded_locally_baer", &self.graded_locally_baer),
            ("graded_locally_baer_star", &self.graded_locally_baer_star),
            ("baer", &self.baer),
            ("graded_baer", &self.graded_baer),
            ("graded_baer_star", &self.graded_baer_star),
            ("locally_baer_star", &self.locally_baer_star),
            ("baer_star", &self.baer_star),
            ("positive_definite", &self.positive_definite),
        ]
    }

    /// Implications every report must respect. Returns the broken ones.
    pub fn inconsistencies(&self) -> Vec<&'static str> {
        use Verdict::*;
        let mut out = Vec::new();
        if self.baer.verdict == Yes && self.locally_baer.verdict != Yes {
            out.push("baer without locally_baer");
        }
        if self.baer_star.verdict == Yes && (self.locally_baer_star.verdict != Yes || self.baer.verdict != Yes) {
            out.push("baer_star without locally_baer_star and baer");
        }
        if self.rickart.verdict != self.unital.verdict || self.graded_rickart.verdict != self.unital.verdict {
            out.push("rickart, graded_rickart and unital differ");
        }
        if self.rickart.verdict == Yes && self.unital.verdict != Yes {
            out.push("rickart without unital");
        }
        if self.locally_rickart.verdict != Yes {
            out.push("locally_rickart is not Yes");
        }
        for (star, plain) in [
            (&self.graded_rickart_star, &self.graded_rickart),
            (&self.graded_locally_baer_star, &self.graded_locally_baer),
            (&self.graded_baer_star, &self.graded_baer),
        ] {
            if star.verdict == Yes && plain.verdict != Yes {
                out.push("a * variant holds while its plain variant fails");
            }
        }
        for (_, e) in self.entries() {
            if e.verdict == No && e.witness.is_none() {
                out.push("a No verdict without witness");
            }
        }
        out
    }
}

fn edge_id(g: &Ultragraph, i: usize) -> &str {
    &g.edges[i].id
}

pub fn path_json(g: &Ultragraph, p: &Path) -> Value {
    match p {
        Path::Trivial(v) => json!({ "vertex": v }),
        Path::Edges(es) => json!(es.iter().map(|&i| edge_id(g, i)).collect::<Vec<_>>()),
    }
}

pub fn exit_json(g: &Ultragraph, x: &ExitWitness) -> Value {
    match x {
        ExitWitness::Edge { edge, index } => {
            json!({ "kind": "edge", "edge": edge_id(g, *edge), "index": index })
        }
        ExitWitness::Sink { sinks, index } => {
            json!({ "kind": "sink", "sinks": sinks.to_string(), "index": index })
        }
    }
}

/// First failing clause of "row-finite, no-exit, every infinite path ends in
/// a sink or a cycle".
fn baer_condition_witness(g: &Ultragraph) -> Option<Value> {
    if let Some(RowFiniteWitness::InfiniteRange { edge }) = g.row_finite_witness() {
        let range = &g.edges[g.edge_index(&edge).unwrap()].range;
        return Some(
            json!({ "clause": "row_finite", "edge": edge, "range": range.to_string(), "cardinality": "infinite" }),
        );
    }
    if let Some(w) = paths::no_exit_witness(g) {
        return Some(json!({
            "clause": "no_exit",
            "cycle": path_json(g, &w.cycle),
            "exit": exit_json(g, &w.exit),
        }));
    }
    if let Some(w) = paths::infinite_path_witness(g) {
        let walk = |ws: &Vec<usize>| ws.iter().map(|&i| edge_id(g, i)).collect::<Vec<_>>();
        return Some(json!({
            "clause": "infinite_paths_end_in_sink_or_cycle",
            "edge": edge_id(g, w.node),
            "successors": [edge_id(g, w.successors.0), edge_id(g, w.successors.1)],
            "walks": [walk(&w.walks.0), walk(&w.walks.1)],
        }));
    }
    None
}

fn finiteness_witness(g: &Ultragraph) -> Option<Value> {
    if g.is_finite() {
        None
    } else {
        Some(json!({ "clause": "finite", "universe": g.universe.to_string() }))
    }
}

fn component_json(g: &Ultragraph, c: &paths::Component) -> Value {
    json!({
        "edges": c.edges.iter().map(|&i| edge_id(g, i)).collect::<Vec<_>>(),
        "vertices": c.vertices.to_string(),
        "kind": c.kind,
    })
}

/// A `*` variant without positive definiteness: it implies its plain
/// variant, since projections are idempotents, but nothing more is known.
fn star_without_pd(plain: &Entry, citation: &str, pd_witness: &Value) -> Entry {
    match plain.verdict {
        Verdict::No => Entry::new(Verdict::No, citation, plain.witness.clone()),
        _ => Entry::new(
            Verdict::NotDetermined,
            citation,
            Some(json!({ "ring_not_positive_definite": pd_witness })),
        ),
    }
}

pub fn classify(g: &Ultragraph, r: &RingDescriptor) -> Result<PropertyReport, Error> {
    if let Err(v) = g.validate() {
        return Err(Error::InvalidInput(
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        ));
    }
    if r.factors.is_empty() {
        return Err(Error::InvalidInput("a ring needs at least one factor".into()));
    }
    let pd = r.positive_definite();
    let pd_witness = match r.square_sum_witness() {
        Some((field, xs)) => json!({ "field": field.to_string(), "squares_of": xs, "sum": 0 }),
        None => Value::Null,
    };

    let ctx = g.algebra_context();
    let unital_cert = ctx.whole_vertex_set_in_g0();
    let unital = unital_cert.is_member();
    let unital_witness = match &unital_cert {
        MembershipCertificate::Member { .. } => None,
        other => Some(json!({ "whole_vertex_set_not_generalized": other })),
    };
    let unital_entry = |cite: &str| Entry::new(Verdict::from_bool(unital), cite, unital_witness.clone());

    let yes = |cite: &str| Entry::new(Verdict::Yes, cite, None);
    let locally_rickart = yes("Thm Rickart");
    let graded_locally_rickart = yes("Thm Rickart");
    let graded_locally_rickart_star = if pd {
        yes("Thm Rickart")
    } else {
        Entry::new(
            Verdict::NotDetermined,
            "Thm Rickart",
            Some(json!({ "ring_not_positive_definite": pd_witness })),
        )
    };

    let rickart = unital_entry("Thm Rickart (i)");
    let graded_rickart = unital_entry("Thm Rickart (i)");
    let graded_rickart_star = if pd {
        unital_entry("Thm Rickart (i)")
    } else {
        star_without_pd(&graded_rickart, "Thm Rickart (iii)", &pd_witness)
    };

    let baer_cond_witness = baer_condition_witness(g);
    let baer_cond = baer_cond_witness.is_none();
    let lb_entry = || Entry::new(Verdict::from_bool(baer_cond), "Thm Baer (i)", baer_cond_witness.clone());
    let locally_baer = lb_entry();
    let graded_locally_baer = lb_entry();
    let graded_locally_baer_star = if pd {
        lb_entry()
    } else {
        star_without_pd(&graded_locally_baer, "Thm Baer (iv)", &pd_witness)
    };

    let baer_witness = finiteness_witness(g).or_else(|| {
        let (no_exit, inf) = (paths::no_exit_witness(g), paths::infinite_path_witness(g));
        if no_exit.is_some() || inf.is_some() {
            baer_condition_witness(g)
        } else {
            None
        }
    });
    let b_entry = || {
        Entry::new(
            Verdict::from_bool(baer_witness.is_none()),
            "Thm Baer (i')",
            baer_witness.clone(),
        )
    };
    let baer = b_entry();
    let graded_baer = b_entry();
    let graded_baer_star = if pd {
        b_entry()
    } else {
        star_without_pd(&graded_baer, "Thm Baer (iv')", &pd_witness)
    };

    let decomposition = paths::decompose_components(g);
    let bad_component = decomposition
        .components
        .iter()
        .find(|c| c.kind == ComponentKind::Other)
        .map(|c| component_json(g, c));
    let locally_baer_star = if pd {
        Entry::new(
            Verdict::from_bool(bad_component.is_none()),
            "Thm baer* (i)",
            bad_component.clone().map(|c| json!({ "component": c })),
        )
    } else {
        Entry::new(
            Verdict::NotDetermined,
            "Thm baer* (i)",
            Some(json!({ "ring_not_positive_definite": pd_witness })),
        )
    };

    // finitely many finite components, each acyclic or an isolated loop
    let baer_star_witness = finiteness_witness(g).or_else(|| {
        decomposition
            .components
            .iter()
            .find(|c| {
                let sub = Ultragraph::new(g.universe, c.edges.iter().map(|&i| g.edges[i].clone()).collect());
                c.kind != ComponentKind::IsolatedLoop && !paths::find_cycles(&sub).is_empty()
            })
            .map(|c| json!({ "component": component_json(g, c) }))
    });
    let baer_star = if pd {
        Entry::new(
            Verdict::from_bool(baer_star_witness.is_none()),
            "Thm baer* (i')",
            baer_star_witness,
        )
    } else {
        Entry::new(
            Verdict::NotDetermined,
            "Thm baer* (i')",
            Some(json!({ "ring_not_positive_definite": pd_witness })),
        )
    };

    let positive_definite = Entry::new(
        Verdict::from_bool(pd),
        "Lemma pos-def",
        if pd { None } else { Some(pd_witness.clone()) },
    );

    let report = PropertyReport {
        unital: unital_entry("unital iff G⁰ is a generalized vertex"),
        locally_rickart,
        graded_locally_rickart,
        graded_locally_rickart_star,
        rickart,
        graded_rickart,
        graded_rickart_star,
        locally_baer,
        graded_locally_baer,
        graded_locally_baer_star,
        baer,
        graded_baer,
        graded_baer_star,
        locally_baer_star,
        baer_star,
        positive_definite,
    };
    let broken = report.inconsistencies();
    if !broken.is_empty() {
        return Err(Error::Internal(format!("inconsistent report: {}", broken.join(", "))));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setalg::{Universe, UpSet};
    use crate::ultragraph::Edge;

    fn q() -> RingDescriptor {
        RingDescriptor::default()
    }

    #[test]
    fn field_witnesses() {
        assert!(FieldDescriptor::Rationals.positive_definite());
        assert_eq!(FieldDescriptor::PrimeField(2).square_sum_witness(), Some(vec![1, 1]));
        assert_eq!(FieldDescriptor::PrimeField(5).square_sum_witness(), Some(vec![1, 2]));
        assert_eq!(FieldDescriptor::PrimeField(3).square_sum_witness(), Some(vec![1, 1, 1]));
        assert!(FieldDescriptor::prime_field(4).is_err());
        let r = RingDescriptor::new(vec![FieldDescriptor::PrimeField(2), FieldDescriptor::Rationals]).unwrap();
        assert!(!r.positive_definite());
        assert_eq!(r.to_string(), "F2 x Q");
    }

    #[test]
    fn single_vertex() {
        let g = Ultragraph::new(Universe::Finite(1), vec![]);
        let rep = classify(&g, &q()).unwrap();
        assert_eq!(rep.baer_star.verdict, Verdict::Yes);
        assert_eq!(rep.baer.verdict, Verdict::Yes);
        assert_eq!(rep.rickart.verdict, Verdict::Yes);
    }

    #[test]
    fn isolated_loop() {
        let g = Ultragraph::new(Universe::Finite(1), vec![Edge::new("e", 0, UpSet::singleton(0))]);
        let rep = classify(&g, &q()).unwrap();
        assert_eq!(rep.baer_star.verdict, Verdict::Yes);
        assert_eq!(rep.baer_star.citation, "Thm baer* (i')");
        assert_eq!(rep.baer.verdict, Verdict::Yes);
    }

    #[test]
    fn intro_truncation() {
        let g = Ultragraph::new(
            Universe::CountablyInfinite,
            (1..=3)
                .map(|i| Edge::new(format!("e{i}"), i, UpSet::cofinite(0..i)))
                .collect(),
        );
        let rep = classify(&g, &q()).unwrap();
        assert_eq!(rep.rickart.verdict, Verdict::Yes);
        assert_eq!(rep.locally_baer.verdict, Verdict::No);
        let w = rep.locally_baer.witness.unwrap();
        assert_eq!(w["edge"], "e1");
        assert_eq!(w["cardinality"], "infinite");
    }

    #[test]
    fn loop_with_exit() {
        let g = Ultragraph::new(Universe::Finite(2), vec![Edge::new("e", 0, UpSet::finite([0, 1]))]);
        let rep = classify(&g, &q()).unwrap();
        assert_eq!(rep.baer.verdict, Verdict::No);
        let w = rep.baer.witness.unwrap();
        assert_eq!(w["clause"], "no_exit");
        assert_eq!(w["cycle"], json!(["e"]));
    }

    #[test]
    fn non_positive_definite_ring() {
        let g = Ultragraph::new(Universe::Finite(2), vec![Edge::new("e", 0, UpSet::singleton(1))]);
        let r = RingDescriptor::new(vec![FieldDescriptor::PrimeField(2), FieldDescriptor::Rationals]).unwrap();
        let rep = classify(&g, &r).unwrap();
        assert_eq!(rep.locally_baer.verdict, Verdict::Yes);
        assert_eq!(rep.graded_baer_star.verdict, Verdict::NotDetermined);
        assert_eq!(rep.positive_definite.verdict, Verdict::No);
    }

    #[test]
    fn invalid_input_rejected() {
        let g = Ultragraph::new(Universe::Finite(2), vec![Edge::new("e", 0, UpSet::empty())]);
        assert!(matches!(classify(&g, &q()), Err(Error::InvalidInput(_))));
    }
}
