use serde::Serialize;

/// Strong-Kleene truth values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    False,
    Undefined,
    True,
}

impl Truth {
    pub const ALL: [Truth; 3] = [Truth::False, Truth::Undefined, Truth::True];

    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Truth::True
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Undefined => Truth::Undefined,
        }
    }

    /// Minimum in the order False < Undefined < True.
    pub fn and(self, other: Self) -> Self {
        self.min(other)
    }

    pub fn or(self, other: Self) -> Self {
        self.max(other)
    }

    pub fn implies(self, other: Self) -> Self {
        self.not().or(other)
    }
}

#[cfg(test)]
mod tests {
    use super::Truth::{self, *};

    #[test]
    fn kleene_tables() {
        assert_eq!(Undefined.and(False), False);
        assert_eq!(Undefined.or(True), True);
        assert_eq!(Undefined.implies(True), True);
        assert_eq!(False.implies(Undefined), True);
        assert_eq!(True.implies(Undefined), Undefined);
        assert_eq!(Undefined.not(), Undefined);
        for a in Truth::ALL {
            assert_eq!(a.not().not(), a);
        }
    }
}
