use super::{AutomatonSystem, GeneratorSpec};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: &[&str] = &["grigorchuk", "odometer2"];

/// The first Grigorchuk group on the binary tree.
pub fn grigorchuk() -> AutomatonSystem {
    let gens = vec![
        GeneratorSpec::new("a", &[(1, &[]), (0, &[])]),
        GeneratorSpec::new("b", &[(0, &["a"]), (1, &["c"])]),
        GeneratorSpec::new("c", &[(0, &["a"]), (1, &["d"])]),
        GeneratorSpec::new("d", &[(0, &[]), (1, &["b"])]),
    ];
    let relations = ["a^2=e", "b^2=e", "c^2=e", "d^2=e", "bc=d", "cb=d", "bd=c", "db=c", "cd=b", "dc=b"];
    AutomatonSystem::new("grigorchuk", 2, gens, relations.iter().map(|s| s.to_string()).collect())
        .expect("built-in table is valid")
}

/// The binary adding machine: `t·0w = 1w`, `t·1w = 0(t·w)`.
pub fn odometer2() -> AutomatonSystem {
    let gens = vec![GeneratorSpec::new("t", &[(1, &[]), (0, &["t"])])];
    AutomatonSystem::new("odometer2", 2, gens, Vec::new()).expect("built-in table is valid")
}

pub fn builtin(name: &str) -> Result<AutomatonSystem> {
    match name {
        "grigorchuk" => Ok(grigorchuk()),
        "odometer2" | "odometer" => Ok(odometer2()),
        _ => Err(Error::InvalidArgument(format!(
            "unknown built-in system `{name}` (known: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}
