//! Interchange encodings: a JSON-friendly PD record and classical signed
//! Gauss codes. Both are lossless for this crate's diagram model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Crossing, DiagramError, LinkDiagram, Pass};

/// Serialized diagram. Each crossing is its four arc labels counterclockwise
/// from the incoming under arc; `signs` runs parallel to `crossings`;
/// `components` lists arc labels in orientation order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PdCode {
    pub crossings: Vec<[usize; 4]>,
    pub signs: Vec<i8>,
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdCodeError {
    #[error("{0} crossings but {1} signs")]
    LengthMismatch(usize, usize),
    #[error("crossing {0} has sign {1}; expected +1 or -1")]
    BadSign(usize, i8),
    #[error("crossing {crossing} uses arc label {label} that appears in no component")]
    UnknownLabel { crossing: usize, label: usize },
    #[error("arc label {0} appears twice in the components")]
    DuplicateLabel(usize),
    #[error(transparent)]
    Invalid(#[from] DiagramError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaussCodeError {
    #[error("unreadable token {0:?}")]
    BadToken(String),
    #[error("crossing {0} is visited {1} times as {2}; expected exactly once")]
    VisitCount(usize, usize, &'static str),
    #[error("crossing {0} carries both signs")]
    SignMismatch(usize),
    #[error(transparent)]
    Invalid(#[from] DiagramError),
}

impl LinkDiagram {
    pub fn pd_code(&self) -> PdCode {
        PdCode {
            crossings: self.crossings().iter().map(Crossing::cyclic_edges).collect(),
            signs: self.crossings().iter().map(|c| c.sign).collect(),
            components: self.components().to_vec(),
        }
    }

    /// Signed double-occurrence text: per component, one `O<id><sign>` or
    /// `U<id><sign>` token for each crossing visit in orientation order,
    /// components joined by ";". Crossing ids are 1-based. A crossing-free
    /// circle contributes an empty segment.
    pub fn gauss_code(&self) -> String {
        let inc = self.incidence().expect("validated diagram");
        let mut parts = Vec::new();
        for comp in self.components() {
            let mut tokens = Vec::new();
            for &e in comp {
                if let Some((ci, pass)) = inc.head[e] {
                    let tag = match pass {
                        Pass::Over => 'O',
                        Pass::Under => 'U',
                    };
                    let sign = if self.crossings()[ci].sign > 0 { '+' } else { '-' };
                    tokens.push(format!("{tag}{}{sign}", ci + 1));
                }
            }
            parts.push(tokens.join(" "));
        }
        parts.join(" ; ")
    }

    pub fn from_gauss_code(text: &str) -> Result<LinkDiagram, GaussCodeError> {
        let text = text.trim();
        let segments: Vec<&str> = if text.is_empty() {
            vec![""]
        } else {
            text.split(';').map(str::trim).collect()
        };
        // Parse every visit first: (component, pass, label, sign).
        let mut visits: Vec<Vec<(Pass, usize, i8)>> = Vec::new();
        for seg in &segments {
            let mut comp = Vec::new();
            for tok in seg.split_whitespace() {
                comp.push(parse_token(tok)?);
            }
            visits.push(comp);
        }
        let mut labels: Vec<usize> =
            visits.iter().flatten().map(|&(_, label, _)| label).collect();
        labels.sort_unstable();
        labels.dedup();

        // Arc ids run component-major; the arc entering visit j of a
        // component is arc j of that component.
        let mut arc_base = Vec::with_capacity(visits.len());
        let mut total = 0;
        for comp in &visits {
            arc_base.push(total);
            total += comp.len().max(1);
        }
        let mut over: Vec<Option<(usize, usize)>> = vec![None; labels.len()];
        let mut under: Vec<Option<(usize, usize)>> = vec![None; labels.len()];
        let mut signs: Vec<Option<i8>> = vec![None; labels.len()];
        for (ci, comp) in visits.iter().enumerate() {
            let k = comp.len();
            for (j, &(pass, label, sign)) in comp.iter().enumerate() {
                let idx = labels.binary_search(&label).unwrap();
                let arc_in = arc_base[ci] + j;
                let arc_out = arc_base[ci] + (j + 1) % k;
                let slot = match pass {
                    Pass::Over => &mut over[idx],
                    Pass::Under => &mut under[idx],
                };
                if slot.replace((arc_in, arc_out)).is_some() {
                    let name = if pass == Pass::Over { "over" } else { "under" };
                    return Err(GaussCodeError::VisitCount(label, 2, name));
                }
                match signs[idx] {
                    None => signs[idx] = Some(sign),
                    Some(s) if s != sign => return Err(GaussCodeError::SignMismatch(label)),
                    _ => {}
                }
            }
        }
        let mut crossings = Vec::with_capacity(labels.len());
        for (idx, &label) in labels.iter().enumerate() {
            let (over_in, over_out) =
                over[idx].ok_or(GaussCodeError::VisitCount(label, 0, "over"))?;
            let (under_in, under_out) =
                under[idx].ok_or(GaussCodeError::VisitCount(label, 0, "under"))?;
            crossings.push(Crossing {
                under_in,
                under_out,
                over_in,
                over_out,
                sign: signs[idx].unwrap(),
            });
        }
        let components: Vec<Vec<usize>> = visits
            .iter()
            .enumerate()
            .map(|(ci, comp)| (0..comp.len().max(1)).map(|j| arc_base[ci] + j).collect())
            .collect();
        Ok(LinkDiagram::from_parts(crossings, components)?)
    }
}

fn parse_token(tok: &str) -> Result<(Pass, usize, i8), GaussCodeError> {
    let bad = || GaussCodeError::BadToken(tok.to_string());
    let mut chars = tok.chars();
    let pass = match chars.next() {
        Some('O') => Pass::Over,
        Some('U') => Pass::Under,
        _ => return Err(bad()),
    };
    let rest: Vec<char> = chars.collect();
    if rest.len() < 2 {
        return Err(bad());
    }
    let sign = match rest[rest.len() - 1] {
        '+' => 1,
        '-' => -1,
        _ => return Err(bad()),
    };
    let digits: String = rest[..rest.len() - 1].iter().collect();
    let label: usize = digits.parse().map_err(|_| bad())?;
    if label == 0 {
        return Err(bad());
    }
    Ok((pass, label, sign))
}

impl PdCode {
    pub fn to_diagram(&self) -> Result<LinkDiagram, PdCodeError> {
        if self.crossings.len() != self.signs.len() {
            return Err(PdCodeError::LengthMismatch(self.crossings.len(), self.signs.len()));
        }
        // Arbitrary labels are compacted in sorted order, so canonical
        // 0-based labels map to themselves.
        let mut labels: Vec<usize> = self.components.iter().flatten().copied().collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            let dup = labels.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
            return Err(PdCodeError::DuplicateLabel(dup));
        }
        let relabel = |label: usize, crossing: usize| {
            labels
                .binary_search(&label)
                .map_err(|_| PdCodeError::UnknownLabel { crossing, label })
        };
        let mut crossings = Vec::with_capacity(self.crossings.len());
        for (ci, (&[e1, e2, e3, e4], &sign)) in
            self.crossings.iter().zip(&self.signs).enumerate()
        {
            if sign != 1 && sign != -1 {
                return Err(PdCodeError::BadSign(ci, sign));
            }
            let [a, b, c, d] =
                [relabel(e1, ci)?, relabel(e2, ci)?, relabel(e3, ci)?, relabel(e4, ci)?];
            let crossing = if sign > 0 {
                Crossing { under_in: a, over_out: b, under_out: c, over_in: d, sign }
            } else {
                Crossing { under_in: a, over_in: b, under_out: c, over_out: d, sign }
            };
            crossings.push(crossing);
        }
        let components: Vec<Vec<usize>> = self
            .components
            .iter()
            .map(|comp| comp.iter().map(|&e| labels.binary_search(&e).unwrap()).collect())
            .collect();
        Ok(LinkDiagram::from_parts(crossings, components)?)
    }
}
