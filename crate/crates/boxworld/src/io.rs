//! JSON encodings for the file formats the command-line front end reads
//! and writes.
//!
//! Rationals appear as strings, `"p/q"` or `"p"` when the denominator is
//! one.  Parsers take raw bytes and report malformed input with line and
//! column positions; domain validation (outcome counts, table
//! completeness, squareness) reuses the constructors' errors.  Writers
//! emit deterministic output: map entries in key order, struct fields in
//! declaration order.

use serde::{Deserialize, Serialize};

use crate::bell::BellFunctional;
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::states::{ProbabilityTable, StateVector};
use crate::theory::{SiteSpec, SystemSpec};
use crate::transforms::LinearMap;
use crate::{Error, Result};

/// Basis tag accepted in linear-map files.
pub const MAP_BASIS: &str = "canonical-v1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteDto {
    outcomes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDto {
    sites: Vec<SiteDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDto {
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntryDto {
    settings: Vec<usize>,
    outcomes: Vec<usize>,
    p: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDto {
    matrix: Vec<Vec<Rational>>,
    basis: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BellEntryDto {
    settings: Vec<usize>,
    outcomes: Vec<usize>,
    c: Rational,
}

fn json_error(err: serde_json::Error) -> Error {
    Error::Json {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

fn decode<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(json_error)
}

fn encode<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serialization of plain data cannot fail")
}

/// Parses `{"sites":[{"outcomes":[…]},…]}`.
pub fn parse_system_spec(bytes: &[u8]) -> Result<SystemSpec> {
    let dto: SystemDto = decode(bytes)?;
    let sites = dto
        .sites
        .into_iter()
        .map(|s| SiteSpec::new(s.outcomes))
        .collect::<Result<Vec<_>>>()?;
    SystemSpec::new(sites)
}

pub fn system_spec_json(sys: &SystemSpec) -> String {
    let dto = SystemDto {
        sites: sys
            .sites()
            .iter()
            .map(|s| SiteDto {
                outcomes: s.outcome_counts().to_vec(),
            })
            .collect(),
    };
    encode(&dto)
}

/// Parses `{"values":["p/q",…]}`.  The basis order is the one every other
/// vector in this crate uses; dimension checks happen where the state
/// meets a system.
pub fn parse_state_vector(bytes: &[u8]) -> Result<StateVector> {
    let dto: StateDto = decode(bytes)?;
    Ok(StateVector::new(crate::linalg::Vector::new(dto.values)))
}

pub fn state_vector_json(state: &StateVector) -> String {
    let dto = StateDto {
        values: state.values().iter().cloned().collect(),
    };
    encode(&dto)
}

/// Parses a list of `{"settings":[…],"outcomes":[…],"p":"p/q"}` into a
/// complete probability table for the system.
pub fn parse_probability_table(bytes: &[u8], sys: &SystemSpec) -> Result<ProbabilityTable> {
    let entries: Vec<TableEntryDto> = decode(bytes)?;
    ProbabilityTable::new(
        sys,
        entries.into_iter().map(|e| (e.settings, e.outcomes, e.p)),
    )
}

pub fn probability_table_json(table: &ProbabilityTable) -> String {
    let entries: Vec<TableEntryDto> = table
        .iter()
        .map(|((settings, outcomes), p)| TableEntryDto {
            settings: settings.clone(),
            outcomes: outcomes.clone(),
            p: p.clone(),
        })
        .collect();
    encode(&entries)
}

/// Parses `{"matrix":[["p/q",…],…],"basis":"canonical-v1"}` into a square
/// linear map.
pub fn parse_linear_map(bytes: &[u8]) -> Result<LinearMap> {
    let dto: MapDto = decode(bytes)?;
    if dto.basis != MAP_BASIS {
        return Err(Error::Format(format!(
            "unsupported basis {:?}, expected {MAP_BASIS:?}",
            dto.basis
        )));
    }
    let n = dto.matrix.len();
    for row in &dto.matrix {
        if row.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
    }
    LinearMap::new(Matrix::from_rows(dto.matrix))
}

pub fn linear_map_json(map: &LinearMap) -> String {
    let dto = MapDto {
        matrix: map.matrix().row_iter().map(<[Rational]>::to_vec).collect(),
        basis: MAP_BASIS.to_string(),
    };
    encode(&dto)
}

/// Parses a list of `{"settings":[…],"outcomes":[…],"c":"p/q"}` into a
/// functional over the system's full table domain.
pub fn parse_bell_functional(bytes: &[u8], sys: &SystemSpec) -> Result<BellFunctional> {
    let entries: Vec<BellEntryDto> = decode(bytes)?;
    BellFunctional::new(
        sys,
        entries.into_iter().map(|e| (e.settings, e.outcomes, e.c)),
    )
}

pub fn bell_functional_json(functional: &BellFunctional) -> String {
    let entries: Vec<BellEntryDto> = functional
        .iter()
        .map(|((settings, outcomes), c)| BellEntryDto {
            settings: settings.clone(),
            outcomes: outcomes.clone(),
            c: c.clone(),
        })
        .collect();
    encode(&entries)
}
