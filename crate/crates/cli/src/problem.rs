//! JSON problem specifications.

use fockmod::linalg::c;
use fockmod::variety::{build_constrained, commutator_ideal, ConstrainedModule, NCPolynomial};
use fockmod::{FockNModule, TruncatedFock, Vector, Word};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema_version: u32,
    /// Alphabet size of each factor.
    pub n: Vec<usize>,
    /// Truncation degree of each factor.
    pub d: Vec<usize>,
    #[serde(default = "one")]
    pub coeff_dim: usize,
    /// Each generator is a sum of terms.
    #[serde(default)]
    pub generators: Vec<Vec<Term>>,
    /// One entry per factor: `"commutator"`, `"none"`, or a list of polynomials.
    #[serde(default)]
    pub ideals: Vec<IdealSpec>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Sample points for multiplier evaluation, each a list of `[re, im]`.
    #[serde(default)]
    pub points: Vec<Vec<[f64; 2]>>,
    /// `(i, j)` selecting `Φ_ij`.
    #[serde(default)]
    pub key: Option<(usize, usize)>,
}

fn one() -> usize {
    1
}

/// A basis vector given either by flat index or by one word per factor.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    #[serde(default)]
    pub index: Option<usize>,
    #[serde(default)]
    pub words: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub coeff: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum IdealSpec {
    Named(String),
    Polynomials(Vec<Vec<PolyTerm>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub word: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl ProblemSpec {
    pub fn parse(text: &str, degree: Option<usize>) -> Result<Self, String> {
        let mut spec: ProblemSpec = serde_json::from_str(text).map_err(|e| format!("malformed spec: {e}"))?;
        if let Some(d) = degree {
            spec.d.iter_mut().for_each(|x| *x = d);
        }
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!("unsupported schema_version {}", self.schema_version));
        }
        if self.n.is_empty() || self.n.len() != self.d.len() {
            return Err("n and d must be non-empty and of equal length".into());
        }
        if self.n.contains(&0) {
            return Err("alphabet sizes must be positive".into());
        }
        if self.coeff_dim == 0 {
            return Err("coeff_dim must be positive".into());
        }
        if self.tolerance.is_some_and(|t| !(t > 0.0)) {
            return Err("tolerance must be positive".into());
        }
        for (g, terms) in self.generators.iter().enumerate() {
            if terms.is_empty() {
                return Err(format!("generator {g} has no terms"));
            }
            for t in terms {
                self.term_index(t).map_err(|e| format!("generator {g}: {e}"))?;
            }
        }
        if !self.ideals.is_empty() && self.ideals.len() != self.n.len() {
            return Err(format!("expected {} ideal entries, found {}", self.n.len(), self.ideals.len()));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.n.len()
    }

    pub fn module(&self) -> FockNModule {
        let shape: Vec<(usize, usize)> = self.n.iter().copied().zip(self.d.iter().copied()).collect();
        FockNModule::new(&shape)
    }

    pub fn space(&self) -> Result<TruncatedFock, String> {
        if self.k() != 1 {
            return Err(format!("command needs a single factor, spec has {}", self.k()));
        }
        Ok(TruncatedFock::new(self.n[0], self.d[0]))
    }

    pub fn ambient_dim(&self) -> usize {
        self.module().dim() * self.coeff_dim
    }

    fn term_index(&self, t: &Term) -> Result<usize, String> {
        if t.coeff >= self.coeff_dim {
            return Err(format!("coeff {} outside 0..{}", t.coeff, self.coeff_dim));
        }
        let module = self.module();
        let base = match (&t.index, &t.words) {
            (Some(i), None) => {
                if *i >= module.dim() {
                    return Err(format!("index {i} outside 0..{}", module.dim()));
                }
                *i
            }
            (None, Some(ws)) => {
                if ws.len() != self.k() {
                    return Err(format!("expected {} words, found {}", self.k(), ws.len()));
                }
                let mut words = Vec::new();
                for (i, letters) in ws.iter().enumerate() {
                    if letters.len() > self.d[i] {
                        return Err(format!("word {letters:?} exceeds degree {}", self.d[i]));
                    }
                    words.push(Word::new(letters.clone(), self.n[i]).map_err(|e| e.to_string())?);
                }
                module.basis_index(&words)
            }
            _ => return Err("term needs exactly one of index or words".into()),
        };
        Ok(base * self.coeff_dim + t.coeff)
    }

    pub fn generator_vectors(&self) -> Vec<Vector> {
        let dim = self.ambient_dim();
        self.generators
            .iter()
            .map(|terms| {
                let mut v = Vector::zeros(dim);
                for t in terms {
                    v[self.term_index(t).expect("validated")] += c(t.re, t.im);
                }
                v
            })
            .collect()
    }

    /// One constrained module per factor; a missing `ideals` list means commutator ideals.
    pub fn constrained_modules(&self) -> Result<Vec<ConstrainedModule>, String> {
        (0..self.k())
            .map(|i| {
                let space = TruncatedFock::new(self.n[i], self.d[i]);
                let gens = match self.ideals.get(i) {
                    None => commutator_ideal(self.n[i]),
                    Some(IdealSpec::Named(s)) if s == "commutator" => commutator_ideal(self.n[i]),
                    Some(IdealSpec::Named(s)) if s == "none" => Vec::new(),
                    Some(IdealSpec::Named(s)) => return Err(format!("unknown ideal {s:?}")),
                    Some(IdealSpec::Polynomials(ps)) => ps
                        .iter()
                        .map(|terms| {
                            terms.iter().try_fold(NCPolynomial::new(self.n[i]), |p, t| p.term(&t.word, c(t.re, t.im)))
                        })
                        .collect::<fockmod::Result<Vec<_>>>()
                        .map_err(|e| format!("factor {}: {e}", i + 1))?,
                };
                build_constrained(&space, &gens).map_err(|e| format!("factor {}: {e}", i + 1))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_and_index_terms_agree() {
        let by_words = r#"{"schema_version":1,"n":[2,1],"d":[2,2],"generators":[[{"words":[[2],[1]],"re":1}]]}"#;
        let s = ProblemSpec::parse(by_words, None).unwrap();
        let idx = s.module().basis_index(&[Word::new(vec![2], 2).unwrap(), Word::new(vec![1], 1).unwrap()]);
        let by_index = format!(r#"{{"schema_version":1,"n":[2,1],"d":[2,2],"generators":[[{{"index":{idx},"re":1}}]]}}"#);
        let t = ProblemSpec::parse(&by_index, None).unwrap();
        assert_eq!(s.generator_vectors(), t.generator_vectors());
    }

    #[test]
    fn coefficient_slot_is_fastest() {
        let text = r#"{"schema_version":1,"n":[2],"d":[2],"coeff_dim":3,"generators":[[{"words":[[1]],"coeff":2,"re":0,"im":1}]]}"#;
        let v = &ProblemSpec::parse(text, None).unwrap().generator_vectors()[0];
        assert_eq!(v[3 + 2], c(0.0, 1.0));
        assert_eq!(v.iter().filter(|x| x.norm() > 0.0).count(), 1);
    }

    #[test]
    fn validation_errors() {
        let cases = [
            r#"{"schema_version":2,"n":[2],"d":[2]}"#,
            r#"{"schema_version":1,"n":[2,1],"d":[2]}"#,
            r#"{"schema_version":1,"n":[0],"d":[2]}"#,
            r#"{"schema_version":1,"n":[2],"d":[2],"tolerance":0}"#,
            r#"{"schema_version":1,"n":[2],"d":[2],"generators":[[]]}"#,
            r#"{"schema_version":1,"n":[2],"d":[1],"generators":[[{"words":[[1,1]],"re":1}]]}"#,
            r#"{"schema_version":1,"n":[2],"d":[2],"generators":[[{"words":[[1]],"index":1,"re":1}]]}"#,
            r#"{"schema_version":1,"n":[2],"d":[2],"generators":[[{"index":7,"re":1}]]}"#,
            r#"{"schema_version":1,"n":[2],"d":[2],"generators":[[{"words":[[1]],"coeff":1,"re":1}]]}"#,
            r#"{"schema_version":1,"n":[2],"d":[2],"ideals":["commutator","none"]}"#,
        ];
        for text in cases {
            assert!(ProblemSpec::parse(text, None).is_err(), "{text}");
        }
    }

    #[test]
    fn degree_override_applies_before_validation() {
        let text = r#"{"schema_version":1,"n":[2],"d":[3],"generators":[[{"words":[[1,2,1]],"re":1}]]}"#;
        assert!(ProblemSpec::parse(text, None).is_ok());
        assert!(ProblemSpec::parse(text, Some(2)).is_err());
    }

    #[test]
    fn ideal_entries() {
        let text = r#"{"schema_version":1,"n":[2,1],"d":[2,2],
            "ideals":[[[{"word":[1,2],"re":1},{"word":[2,1],"re":-1}]],"none"]}"#;
        let ms = ProblemSpec::parse(text, None).unwrap().constrained_modules().unwrap();
        assert!(ms[0].drury_arveson);
        assert_eq!(ms[1].nj.dim(), 3);
        let unknown = r#"{"schema_version":1,"n":[2],"d":[2],"ideals":["weird"]}"#;
        assert!(ProblemSpec::parse(unknown, None).unwrap().constrained_modules().is_err());
    }
}
