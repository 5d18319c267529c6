//! Citation-count input in CSV or JSON.

use std::path::Path;

use serde::Deserialize;

use crate::funcspace::RankFrequencyFunction;

use super::CliError;

/// What a source provides.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceData {
    /// Citation counts, one per publication.
    Counts(Vec<f64>),
    /// Explicit breakpoints `(x, y)` of a decreasing piecewise-linear function.
    Points(Vec<(f64, f64)>),
}

/// One author (or other source) and its data.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub id: String,
    pub data: SourceData,
    /// Line of the record in the input file.
    pub line: u64,
}

impl Source {
    /// Rank-frequency function of the source and whether counts were resorted.
    pub fn function(&self) -> Result<(RankFrequencyFunction<f64>, bool), CliError> {
        let err = |e: crate::Error| {
            CliError::Input(format!("line {}: source {:?}: {e}", self.line, self.id))
        };
        match &self.data {
            SourceData::Counts(c) => {
                let ingest = RankFrequencyFunction::from_citation_counts(c).map_err(err)?;
                Ok((ingest.function, ingest.resorted))
            }
            SourceData::Points(p) => {
                Ok((RankFrequencyFunction::new(p.clone()).map_err(err)?, false))
            }
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| {
            Err(CliError::Input(format!(
                "line {}: source {:?}: {msg}",
                self.line, self.id
            )))
        };
        match &self.data {
            SourceData::Counts(c) if c.is_empty() => fail("no counts".into()),
            SourceData::Counts(c) => match c.iter().find(|c| !c.is_finite() || **c < 0.0) {
                Some(bad) => fail(format!("counts must be non-negative numbers, got {bad}")),
                None => Ok(()),
            },
            SourceData::Points(_) => self.function().map(|_| ()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSource {
    id: String,
    #[serde(default)]
    counts: Option<Vec<f64>>,
    #[serde(default)]
    points: Option<Vec<(f64, f64)>>,
}

/// Reads sources from `path`; `.json` files are parsed as JSON, anything
/// else as CSV with header `id,counts`.
pub fn read_sources(path: &Path) -> Result<Vec<Source>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    let sources = if is_json {
        parse_json(&text)?
    } else {
        parse_csv(&text)?
    };
    for s in &sources {
        s.validate()?;
    }
    Ok(sources)
}

pub fn parse_json(text: &str) -> Result<Vec<Source>, CliError> {
    let raw: Vec<JsonSource> = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("line {}: {e}", e.line())))?;
    // records carry no position of their own; locate each id in the text
    let mut from = 0;
    raw.into_iter()
        .map(|r| {
            let needle = serde_json::to_string(&r.id).unwrap_or_default();
            let at = text[from..].find(&needle).map(|i| from + i).unwrap_or(from);
            from = at;
            let line = text[..at].matches('\n').count() as u64 + 1;
            let data = match (r.counts, r.points) {
                (Some(c), None) => SourceData::Counts(c),
                (None, Some(p)) => SourceData::Points(p),
                _ => {
                    return Err(CliError::Input(format!(
                        "line {line}: source {:?} needs exactly one of `counts` or `points`",
                        r.id
                    )))
                }
            };
            Ok(Source {
                id: r.id,
                data,
                line,
            })
        })
        .collect()
}

pub fn parse_csv(text: &str) -> Result<Vec<Source>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("line 1: {e}")))?
        .clone();
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "counts" {
        return Err(CliError::Input(format!(
            "line 1: expected header `id,counts`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Input(format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(CliError::Input(format!("line {line}: empty id")));
        }
        let field = &record[1];
        let counts = if field.is_empty() {
            Vec::new()
        } else {
            field
                .split(';')
                .map(|c| {
                    c.trim().parse::<f64>().map_err(|_| {
                        CliError::Input(format!(
                            "line {line}: source {id:?}: bad count {:?}",
                            c.trim()
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        out.push(Source {
            id,
            data: SourceData::Counts(counts),
            line,
        });
    }
    Ok(out)
}
