use std::collections::BTreeMap;
use std::fmt;

/// Which display simplifications to apply when composing a trace.
///
/// `naive` overrides the structural flags (`a` to `e`) and stdlib hiding;
/// the stored values are kept so that turning `naive` off restores them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElisionPolicy {
    /// a: fold the evaluation of an `if` condition into the step choosing a branch.
    pub hide_if_resolution: bool,
    /// b: omit enclosing `let rec` definitions from displayed terms.
    pub hide_function_definitions: bool,
    /// c: show the final run of literal arithmetic as a single `=>*` step.
    pub collapse_arithmetic_tail: bool,
    /// d: fold variable lookups into the trivial operation consuming them.
    pub fold_trivial_arith: bool,
    /// e: move unique literal `let` bindings to the left margin.
    pub lift_global_lets: bool,
    /// f: keyword highlighting.
    pub bold_keywords: bool,
    /// g: underline the subterm reduced by the following step.
    pub underline_redex: bool,
    pub hide_stdlib: bool,
    pub naive: bool,
    /// Merge a lookup with the operation it enables and drop dead `let`
    /// frames in the same step as the rewrite that made them dead. Turning
    /// this off together with `naive` shows every micro-step.
    pub normalize_steps: bool,
}

impl Default for ElisionPolicy {
    fn default() -> Self {
        ElisionPolicy {
            hide_if_resolution: true,
            hide_function_definitions: true,
            collapse_arithmetic_tail: true,
            fold_trivial_arith: true,
            lift_global_lets: true,
            bold_keywords: true,
            underline_redex: true,
            hide_stdlib: true,
            naive: false,
            normalize_steps: true,
        }
    }
}

/// Short names used on the command line and in the wire format.
pub const FLAG_NAMES: [&str; 10] = ["a", "b", "c", "d", "e", "f", "g", "naive", "normalize", "stdlib"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFlag(pub String);

impl fmt::Display for UnknownFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown elision flag '{}' (expected one of {})",
            self.0,
            FLAG_NAMES.join(", ")
        )
    }
}

impl std::error::Error for UnknownFlag {}

impl ElisionPolicy {
    pub fn naive() -> Self {
        ElisionPolicy {
            naive: true,
            ..ElisionPolicy::default()
        }
    }

    /// One display step per micro-step, with no elision of any kind.
    pub fn raw() -> Self {
        ElisionPolicy {
            naive: true,
            normalize_steps: false,
            bold_keywords: false,
            underline_redex: false,
            ..ElisionPolicy::default()
        }
    }

    fn structural(&self, flag: bool) -> bool {
        flag && !self.naive
    }

    pub fn if_resolution(&self) -> bool {
        self.structural(self.hide_if_resolution)
    }

    pub fn function_definitions(&self) -> bool {
        self.structural(self.hide_function_definitions)
    }

    pub fn arithmetic_tail(&self) -> bool {
        self.structural(self.collapse_arithmetic_tail)
    }

    pub fn trivial_arith(&self) -> bool {
        self.structural(self.fold_trivial_arith)
    }

    pub fn global_lets(&self) -> bool {
        self.structural(self.lift_global_lets)
    }

    pub fn stdlib(&self) -> bool {
        self.structural(self.hide_stdlib)
    }

    fn slot(&mut self, name: &str) -> Result<&mut bool, UnknownFlag> {
        Ok(match name {
            "a" => &mut self.hide_if_resolution,
            "b" => &mut self.hide_function_definitions,
            "c" => &mut self.collapse_arithmetic_tail,
            "d" => &mut self.fold_trivial_arith,
            "e" => &mut self.lift_global_lets,
            "f" => &mut self.bold_keywords,
            "g" => &mut self.underline_redex,
            "naive" => &mut self.naive,
            "normalize" => &mut self.normalize_steps,
            "stdlib" => &mut self.hide_stdlib,
            other => return Err(UnknownFlag(other.to_string())),
        })
    }

    pub fn set(&mut self, name: &str, on: bool) -> Result<(), UnknownFlag> {
        *self.slot(name)? = on;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<bool, UnknownFlag> {
        let mut copy = *self;
        copy.slot(name).map(|b| *b)
    }

    pub fn toggle(&mut self, name: &str) -> Result<bool, UnknownFlag> {
        let slot = self.slot(name)?;
        *slot = !*slot;
        Ok(*slot)
    }

    /// Stored flag values keyed by short name.
    pub fn to_map(&self) -> BTreeMap<String, bool> {
        FLAG_NAMES
            .iter()
            .map(|n| (n.to_string(), self.get(n).expect("known flag")))
            .collect()
    }

    /// Flags absent from `map` keep their default value.
    pub fn from_map(map: &BTreeMap<String, bool>) -> Result<Self, UnknownFlag> {
        let mut p = ElisionPolicy::default();
        for (k, v) in map {
            p.set(k, *v)?;
        }
        Ok(p)
    }

    /// All 64 combinations of the structural flags and stdlib hiding, with
    /// everything else at its default.
    pub fn structural_combinations() -> impl Iterator<Item = ElisionPolicy> {
        (0u8..64).map(|bits| {
            let mut p = ElisionPolicy::default();
            for (i, name) in ["a", "b", "c", "d", "e", "stdlib"].iter().enumerate() {
                p.set(name, bits & (1 << i) != 0).expect("known flag");
            }
            p
        })
    }
}
