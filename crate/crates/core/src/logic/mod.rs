//! First-order kernel: terms, literals, clauses, substitutions,
//! θ-subsumption and interpretation-based coverage.

pub mod clause;
pub mod facts;
pub mod matcher;
pub mod schema;
pub mod term;

pub use clause::{canonical_body, class_head, parse_clauses, standardize_apart, Clause, Literal, PredKey};
pub use facts::FactSet;
pub use matcher::Query;
pub use schema::{ArgKind, PredicateInfo, PredicateSchema, Role};
pub use term::{Substitution, Term};

/// True iff some grounding of the body of `clause` makes every body literal a
/// member of `facts`. The head is not consulted.
pub fn covers(clause: &Clause, facts: &FactSet) -> bool {
    Query::body(clause).is_satisfied(facts)
}

/// Witness substitution for [`covers`].
pub fn covering_substitution(clause: &Clause, facts: &FactSet) -> Option<Substitution> {
    Query::body(clause).witness(facts)
}

/// Disjunctive reading of a class theory: some clause covers.
pub fn theory_covers<'a>(theory: impl IntoIterator<Item = &'a Clause>, facts: &FactSet) -> bool {
    theory.into_iter().any(|c| covers(c, facts))
}

/// θ-subsumption: a substitution maps every literal of `general` (head and
/// body) onto a literal of `specific`. Variables of `specific` act as constants.
pub fn theta_subsumes(general: &Clause, specific: &Clause) -> bool {
    let frozen: FactSet = specific.literals().cloned().collect();
    Query::new(general.literals()).is_satisfied(&frozen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(text: &str) -> Clause {
        Clause::parse(text).unwrap()
    }

    fn facts(text: &str) -> FactSet {
        parse_clauses(text).unwrap().into_iter().map(|c| c.head).collect()
    }

    #[test]
    fn subsumption_examples() {
        let c = clause("class(x) :- qrs(A,normal).");
        let d = clause("class(x) :- qrs(A,normal), p(B,normal).");
        assert!(theta_subsumes(&c, &d));
        assert!(!theta_subsumes(&d, &c));
        assert!(theta_subsumes(&d, &d));
        let e = clause("class(x) :- qrs(A,abnormal).");
        let f = clause("class(x) :- qrs(B,normal).");
        assert!(!theta_subsumes(&e, &f));
    }

    #[test]
    fn subsumption_respects_heads() {
        let c = clause("class(x) :- qrs(A,normal).");
        let d = clause("class(y) :- qrs(A,normal).");
        assert!(!theta_subsumes(&c, &d));
    }

    #[test]
    fn subsumption_shares_variables_consistently() {
        let c = clause("class(x) :- suc(A,B), suc(B,A).");
        let d = clause("class(x) :- suc(X,Y), suc(Y,Z).");
        assert!(!theta_subsumes(&c, &d));
        let d2 = clause("class(x) :- suc(X,Y), suc(Y,X).");
        assert!(theta_subsumes(&c, &d2));
    }

    #[test]
    fn coverage_examples() {
        let f = facts("qrs(r8,abnormal). qrs(r9,abnormal). suc(r9,r8). qrs(r7,normal).");
        let c = clause("class(doublet) :- qrs(X,abnormal), qrs(Y,abnormal), suc(Y,X).");
        assert!(covers(&c, &f));
        let w = covering_substitution(&c, &f).unwrap();
        assert_eq!(w.get("X".into()), Some(Term::constant("r8")));
        assert_eq!(w.get("Y".into()), Some(Term::constant("r9")));
        assert!(covers(&clause("class(doublet)."), &f));
        assert!(covers(&clause("class(doublet)."), &FactSet::new()));
        assert!(!covers(&clause("class(doublet) :- p(Z,normal)."), &f));
    }

    #[test]
    fn theory_coverage_is_disjunctive() {
        let f = facts("qrs(r1,normal).");
        let yes = clause("class(a) :- qrs(R,normal).");
        let no = clause("class(a) :- qrs(R,abnormal).");
        assert!(!theory_covers(Vec::<&Clause>::new(), &f));
        assert!(theory_covers([&no, &yes], &f));
        assert!(!theory_covers([&no, &no], &f));
    }

    #[test]
    fn repeated_variable_within_literal() {
        let f = facts("r(a,b). r(c,c).");
        let c = clause("class(x) :- r(X,X).");
        assert_eq!(
            covering_substitution(&c, &f).unwrap().get("X".into()),
            Some(Term::constant("c"))
        );
    }
}
