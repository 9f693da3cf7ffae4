//! Domain scales and the scale system (the level-0 algebra).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use super::ModelError;
use crate::value::{format_number, name, snap_to_grid, Name, Number, Value};

/// How the finite value set of a scale is described.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScaleKind {
    Enumerated(Vec<Name>),
    Integer { lo: i64, hi: i64, step: i64 },
    Decimal { lo: Number, hi: Number, step: Number },
}

/// A finite, explicitly enumerable set of admissible values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    name: Name,
    kind: ScaleKind,
    unit: Option<String>,
}

impl Scale {
    pub fn new(scale: &str, kind: ScaleKind, unit: Option<String>) -> Result<Self, ModelError> {
        let scale_name = name(scale);
        let bad = |reason: &str| ModelError::BadBounds { scale: scale_name.clone(), reason: reason.to_string() };
        match &kind {
            ScaleKind::Enumerated(values) => {
                if values.is_empty() {
                    return Err(ModelError::EmptyScale(scale_name));
                }
                let distinct: BTreeSet<&Name> = values.iter().collect();
                if distinct.len() != values.len() {
                    return Err(bad("enumerated values are not distinct"));
                }
            }
            ScaleKind::Integer { lo, hi, step } => {
                if *step <= 0 {
                    return Err(bad("step must be positive"));
                }
                if lo > hi {
                    return Err(bad("lower bound exceeds upper bound"));
                }
            }
            ScaleKind::Decimal { lo, hi, step } => {
                if !step.is_positive() {
                    return Err(bad("step must be positive"));
                }
                if lo > hi {
                    return Err(bad("lower bound exceeds upper bound"));
                }
            }
        }
        Ok(Scale { name: scale_name, kind, unit })
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn kind(&self) -> &ScaleKind {
        &self.kind
    }

    pub fn unit(&self) -> Option<&str> {
        self.unit.as_deref()
    }

    pub fn is_numeric(&self) -> bool {
        !matches!(self.kind, ScaleKind::Enumerated(_))
    }

    /// `(lo, hi, step)` for numeric scales.
    pub fn grid(&self) -> Option<(Number, Number, Number)> {
        match &self.kind {
            ScaleKind::Enumerated(_) => None,
            ScaleKind::Integer { lo, hi, step } => {
                Some((Number::from_integer(*lo), Number::from_integer(*hi), Number::from_integer(*step)))
            }
            ScaleKind::Decimal { lo, hi, step } => Some((*lo, *hi, *step)),
        }
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            ScaleKind::Enumerated(v) => v.len(),
            _ => {
                let (lo, hi, step) = self.grid().expect("numeric");
                ((hi - lo) / step).floor().to_integer() as usize + 1
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Materialize the value set in scale order.
    pub fn values(&self) -> Vec<Value> {
        match &self.kind {
            ScaleKind::Enumerated(v) => v.iter().cloned().map(Value::Enum).collect(),
            _ => {
                let (lo, _, step) = self.grid().expect("numeric");
                (0..self.len() as i64).map(|k| Value::Num(lo + step * Number::from_integer(k))).collect()
            }
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (ScaleKind::Enumerated(values), Value::Enum(e)) => values.contains(e),
            (ScaleKind::Enumerated(_), _) => false,
            (_, Value::Num(n)) => {
                let (lo, hi, step) = self.grid().expect("numeric");
                *n >= lo && *n <= hi && ((n - lo) / step).is_integer()
            }
            _ => false,
        }
    }

    /// Round an exact number to this scale's grid; `None` if the rounded
    /// value falls outside the bounds.
    pub fn snap(&self, n: &Number) -> Option<Value> {
        let (lo, hi, step) = self.grid()?;
        let snapped = snap_to_grid(n, &lo, &step)?;
        (snapped >= lo && snapped <= hi).then_some(Value::Num(snapped))
    }

    /// Scale description in model-file syntax (without the name).
    pub fn describe(&self) -> String {
        let mut out = match &self.kind {
            ScaleKind::Enumerated(v) => {
                let names: Vec<&str> = v.iter().map(|n| n.as_ref()).collect();
                format!("enum {{ {} }}", names.join(", "))
            }
            ScaleKind::Integer { lo, hi, step } => format!("int {lo} .. {hi} step {step}"),
            ScaleKind::Decimal { lo, hi, step } => {
                format!("dec {} .. {} step {}", format_number(lo), format_number(hi), format_number(step))
            }
        };
        if let Some(unit) = &self.unit {
            out.push_str(&format!(" unit {}", quote(unit)));
        }
        out
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// The collection of all domain scales.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScaleSystem {
    scales: BTreeMap<Name, Scale>,
}

impl ScaleSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define_scale(&mut self, scale: &str, kind: ScaleKind, unit: Option<String>) -> Result<&Scale, ModelError> {
        if self.scales.contains_key(scale) {
            return Err(ModelError::DuplicateScale(name(scale)));
        }
        let built = Scale::new(scale, kind, unit)?;
        let key = built.name.clone();
        Ok(self.scales.entry(key).or_insert(built))
    }

    pub fn insert(&mut self, scale: Scale) -> Result<(), ModelError> {
        if self.scales.contains_key(&scale.name) {
            return Err(ModelError::DuplicateScale(scale.name.clone()));
        }
        self.scales.insert(scale.name.clone(), scale);
        Ok(())
    }

    pub fn remove(&mut self, scale: &str) -> Option<Scale> {
        self.scales.remove(scale)
    }

    pub fn get(&self, scale: &str) -> Option<&Scale> {
        self.scales.get(scale)
    }

    pub fn contains(&self, scale: &str) -> bool {
        self.scales.contains_key(scale)
    }

    /// Scales in name order.
    pub fn iter(&self) -> impl Iterator<Item = &Scale> {
        self.scales.values()
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_scale_materializes_all_values() {
        let mut sys = ScaleSystem::new();
        let s = sys.define_scale("AngleDeg", ScaleKind::Integer { lo: 0, hi: 45, step: 1 }, Some("deg".into())).unwrap();
        assert_eq!(s.len(), 46);
        assert_eq!(s.values().len(), 46);
        assert_eq!(s.unit(), Some("deg"));
        assert!(s.contains(&Value::int(45)));
        assert!(!s.contains(&Value::int(46)));
    }

    #[test]
    fn enumerated_scale() {
        let mut sys = ScaleSystem::new();
        let kind = ScaleKind::Enumerated(vec![name("carbon_steel"), name("alloy_steel")]);
        let s = sys.define_scale("Material", kind, None).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(&Value::enumerated("alloy_steel")));
        assert!(!s.contains(&Value::enumerated("titanium")));
    }

    #[test]
    fn bad_scales_are_rejected() {
        let mut sys = ScaleSystem::new();
        assert!(matches!(
            sys.define_scale("Bad", ScaleKind::Integer { lo: 5, hi: 4, step: 1 }, None),
            Err(ModelError::BadBounds { .. })
        ));
        assert!(matches!(
            sys.define_scale("Bad", ScaleKind::Integer { lo: 0, hi: 4, step: 0 }, None),
            Err(ModelError::BadBounds { .. })
        ));
        assert!(matches!(sys.define_scale("E", ScaleKind::Enumerated(vec![]), None), Err(ModelError::EmptyScale(_))));
        sys.define_scale("A", ScaleKind::Integer { lo: 0, hi: 1, step: 1 }, None).unwrap();
        assert!(matches!(
            sys.define_scale("A", ScaleKind::Integer { lo: 0, hi: 1, step: 1 }, None),
            Err(ModelError::DuplicateScale(_))
        ));
    }

    #[test]
    fn decimal_scale_is_exact() {
        let step = Number::new(1, 100);
        let s = Scale::new("Feed", ScaleKind::Decimal { lo: step, hi: Number::new(20, 100), step }, None).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.contains(&Value::Num(Number::new(7, 100))));
        assert!(!s.contains(&Value::Num(Number::new(7, 1000))));
        assert_eq!(s.snap(&Number::new(74, 1000)), Some(Value::Num(Number::new(7, 100))));
        assert_eq!(s.snap(&Number::new(3, 1)), None);
    }
}
