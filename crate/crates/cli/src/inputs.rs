//! Reading input files, with diagnostics of the form `path:line:col: msg`.

use std::fmt;
use std::fs;
use std::path::Path;

use matinterp::encoding::{catalog, parse_encoding, Catalog, Encoding};
use matinterp::interpretation::{
    parse_constraints, parse_interpretation, parse_param_interpretation, parse_valuation,
    ArithConstraint, Interpretation, ParamInterpretation, Valuation,
};
use matinterp::trs::{dependency_pairs, parse_trs, Rule, Trs};

/// Anything that ends the run with exit code 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl CliError {
    pub fn new(msg: impl fmt::Display) -> Self {
        CliError(msg.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: cannot read: {e}", path.display())))
}

fn parsed<T, E: fmt::Display>(
    path: &Path,
    parse: impl FnOnce(&str) -> Result<T, E>,
) -> Result<T, CliError> {
    let text = read(path)?;
    parse(&text).map_err(|e| CliError(format!("{}:{e}", path.display())))
}

pub fn trs(path: &Path) -> Result<Trs, CliError> {
    parsed(path, parse_trs)
}

/// The TRS and its pairs: `auto` computes dependency pairs, `none` uses no
/// pairs, anything else is a TRS file whose rules are the pairs.
pub fn problem(trs_path: &Path, pairs: &str) -> Result<(Trs, Vec<Rule>), CliError> {
    let system = trs(trs_path)?;
    let pairs = match pairs {
        "auto" => dependency_pairs(&system),
        "none" => Vec::new(),
        file => trs(Path::new(file))?.rules,
    };
    Ok((system, pairs))
}

pub fn interp(path: &Path) -> Result<Interpretation, CliError> {
    parsed(path, parse_interpretation)
}

pub fn pinterp(path: &Path) -> Result<ParamInterpretation, CliError> {
    parsed(path, parse_param_interpretation)
}

pub fn valuation(path: &Path) -> Result<Valuation, CliError> {
    parsed(path, parse_valuation)
}

pub fn constraints(path: &Path) -> Result<Vec<ArithConstraint>, CliError> {
    parsed(path, parse_constraints)
}

/// A catalog name such as `half` or `unit(3)`, else an encoding file.
pub fn encoding(name: &str) -> Result<Encoding, CliError> {
    match name.parse::<Catalog>() {
        Ok(c) => Ok(catalog(c)),
        Err(_) => parsed(Path::new(name), parse_encoding),
    }
}
