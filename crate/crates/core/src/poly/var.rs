//! Symbolic variables.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};

/// The role a symbol plays in a synthesis problem.
///
/// The declaration order doubles as the most significant part of the global
/// variable order used by the term ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    /// A loop variable `x_i`.
    ProgramVar,
    /// The initial value `x_i(0)` of a loop variable; a parameter when left symbolic.
    InitialParam,
    /// An unknown entry of the initial-value matrix `A`.
    EntryA,
    /// An unknown entry of the update matrix `B`.
    EntryB,
    /// An unknown entry of a closed-form coefficient vector `C_ij`.
    CoeffC,
    /// A symbolic eigenvalue.
    RootOmega,
    /// Stand-in for the exponential `omega_i^n` of one root.
    ExpMarker,
    /// The iteration counter `n`.
    IterationN,
    /// Free variable of a characteristic polynomial.
    CharZ,
}

#[derive(PartialEq, Eq, Hash)]
struct VarData {
    name: Box<str>,
    kind: VarKind,
    scope: u32,
}

/// A named symbol. Cheap to clone; equality compares name, kind and scope.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarId(Arc<VarData>);

static NEXT_SCOPE: AtomicU32 = AtomicU32::new(1);

/// Allocates a scope id that no other call has returned, so that symbol
/// families created in different scopes never collide.
pub fn fresh_scope() -> u32 {
    NEXT_SCOPE.fetch_add(1, AtomicOrdering::Relaxed)
}

impl VarId {
    /// A variable in the shared scope 0 (user-facing names).
    ///
    /// Panics on an empty name.
    pub fn new(name: impl Into<String>, kind: VarKind) -> Self {
        VarId::scoped(name, kind, 0)
    }

    pub fn scoped(name: impl Into<String>, kind: VarKind, scope: u32) -> Self {
        let name: String = name.into();
        assert!(!name.is_empty(), "variable names must be non-empty");
        VarId(Arc::new(VarData {
            name: name.into_boxed_str(),
            kind,
            scope,
        }))
    }

    pub fn program(name: impl Into<String>) -> Self {
        VarId::new(name, VarKind::ProgramVar)
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> VarKind {
        self.0.kind
    }

    pub fn scope(&self) -> u32 {
        self.0.scope
    }
}

/// Compares identifiers so that embedded digit runs are ordered numerically
/// (`b2 < b10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut ai, mut bi) = (a.char_indices().peekable(), b.char_indices().peekable());
    loop {
        match (ai.peek().copied(), bi.peek().copied()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some((i, ca)), Some((j, cb))) => {
                if ca.is_ascii_digit() && cb.is_ascii_digit() {
                    let ea = a[i..].find(|c: char| !c.is_ascii_digit()).map_or(a.len(), |k| i + k);
                    let eb = b[j..].find(|c: char| !c.is_ascii_digit()).map_or(b.len(), |k| j + k);
                    let (da, db) = (a[i..ea].trim_start_matches('0'), b[j..eb].trim_start_matches('0'));
                    let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db)).then_with(|| (ea - i).cmp(&(eb - j)));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                    while ai.peek().is_some_and(|&(k, _)| k < ea) {
                        ai.next();
                    }
                    while bi.peek().is_some_and(|&(k, _)| k < eb) {
                        bi.next();
                    }
                } else {
                    let ord = ca.cmp(&cb);
                    if ord != Ordering::Equal {
                        return ord;
                    }
                    ai.next();
                    bi.next();
                }
            }
        }
    }
}

impl Ord for VarId {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .kind
            .cmp(&other.0.kind)
            .then_with(|| natural_cmp(&self.0.name, &other.0.name))
            .then_with(|| self.0.scope.cmp(&other.0.scope))
    }
}

impl PartialOrd for VarId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl Serialize for VarId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order_on_digits() {
        assert_eq!(natural_cmp("b2", "b10"), Ordering::Less);
        assert_eq!(natural_cmp("b1_2", "b1_10"), Ordering::Less);
        assert_eq!(natural_cmp("c1", "c1"), Ordering::Equal);
        assert_eq!(natural_cmp("a", "ab"), Ordering::Less);
        assert_eq!(natural_cmp("x01", "x1"), Ordering::Greater);
    }

    #[test]
    fn scope_distinguishes_equal_names() {
        let a = VarId::scoped("w1", VarKind::RootOmega, fresh_scope());
        let b = VarId::scoped("w1", VarKind::RootOmega, fresh_scope());
        assert_ne!(a, b);
        assert_ne!(a.cmp(&b), Ordering::Equal);
    }
}
