//! Types of the axiom constants `tirr`, `cirr` and `force`.

use std::collections::BTreeSet;

use crate::syntax::{free_names, fresh, Abs, Name, Term};

fn avoid_all(ts: &[&Term], extra: &BTreeSet<Name>) -> BTreeSet<Name> {
    let mut s = extra.clone();
    for t in ts {
        s.extend(free_names(t).all());
    }
    s
}

/// `Σ(c : T). Π(z : T). Id T c z`
pub fn is_contr(t: &Term, avoid: &BTreeSet<Name>) -> Term {
    let used = avoid_all(&[t], avoid);
    let c = fresh("c", &used);
    let mut used2 = used.clone();
    used2.insert(c.clone());
    let z = fresh("z", &used2);
    Term::sigma(
        c.clone(),
        t.clone(),
        Term::pi(z.clone(), t.clone(), Term::id(t.clone(), Term::var(c), Term::var(z))),
    )
}

/// Contractible fibres of `f : A → B`: `Π(y : B). IsContr(Σ(x : A). Id B (f x) y)`.
pub fn is_contr_map(a: &Term, b: &Term, f: &Term, avoid: &BTreeSet<Name>) -> Term {
    let used = avoid_all(&[a, b, f], avoid);
    let y = fresh("y", &used);
    let mut used2 = used.clone();
    used2.insert(y.clone());
    let x = fresh("x", &used2);
    let fiber = Term::sigma(
        x.clone(),
        a.clone(),
        Term::id(b.clone(), Term::app(f.clone(), Term::var(x)), Term::var(y.clone())),
    );
    used2.insert(y.clone());
    Term::pi(y, b.clone(), is_contr(&fiber, &used2))
}

/// `tirr t : ▷(α:κ).▷(α':κ). Id A (t[α]) (t[α'])` for `t : ▷κ A`.
pub fn tirr_type(k: &str, a: &Term, t: &Term, avoid: &BTreeSet<Name>) -> Term {
    let mut used = avoid_all(&[a, t], avoid);
    let a1 = fresh("a", &used);
    used.insert(a1.clone());
    let a2 = fresh("a'", &used);
    Term::later_dep(
        k,
        a1.clone(),
        Term::later_dep(k, a2.clone(), Term::id(a.clone(), Term::tick_app(t.clone(), a1), Term::tick_app(t.clone(), a2))),
    )
}

/// `cirr A : IsContr(λ(x:A). Λκ. x)` for a clock `κ` fresh for `A`.
pub fn cirr_type(a: &Term, avoid: &BTreeSet<Name>) -> Term {
    let mut used = avoid_all(&[a], avoid);
    let k = fresh("k", &used);
    used.insert(k.clone());
    let x = fresh("x", &used);
    let f = Term::Lam(Some(Box::new(a.clone())), Abs::new(x.clone(), Term::clock_lam(k.clone(), Term::var(x))));
    is_contr_map(a, &Term::forall_clk(k, a.clone()), &f, &used)
}

/// `force κ.A : IsContr(λ(x:∀κ.A). Λκ. λ(α:κ). x[κ])`, the canonical map
/// `(∀κ.A) → ∀κ.▷κ A`.
pub fn force_type(k: &str, a: &Term, avoid: &BTreeSet<Name>) -> Term {
    let mut used = avoid_all(&[a], avoid);
    used.insert(k.to_string());
    let x = fresh("x", &used);
    used.insert(x.clone());
    let tick = fresh("a", &used);
    let dom = Term::forall_clk(k, a.clone());
    let cod = Term::forall_clk(k, Term::later(k, a.clone()));
    let f = Term::Lam(
        Some(Box::new(dom.clone())),
        Abs::new(
            x.clone(),
            Term::clock_lam(k, Term::tick_lam(tick, Some(k), Term::clock_app(Term::var(x), k))),
        ),
    );
    is_contr_map(&dom, &cod, &f, &used)
}

/// The axiom constants with their types, stated schematically over a clock
/// `k`, a type `A` and a delayed term `t : ▷k A`.
pub fn axioms() -> Vec<(&'static str, Term)> {
    let a = Term::var("A");
    let none = BTreeSet::new();
    vec![
        ("tirr", tirr_type("k", &a, &Term::var("t"), &none)),
        ("cirr", cirr_type(&a, &none)),
        ("force", force_type("k", &a, &none)),
    ]
}
