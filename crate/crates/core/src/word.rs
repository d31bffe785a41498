//! Timed words: streaming ingestion, serialization and segments.

use std::io::BufRead;

use num_bigint::BigInt;
use thiserror::Error;

use crate::geometry::{format_timestamp, parse_rational, Rational};
use crate::pta::{Symbol, SILENT, TERMINAL};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{name}` is reserved and cannot appear in a word")]
    Reserved { line: usize, name: String },
    #[error("line {line}: timestamp {got} does not exceed the previous timestamp {previous}")]
    NonIncreasing { line: usize, previous: String, got: String },
    #[error("line {line}: timestamps must be positive, got {got}")]
    NonPositive { line: usize, got: String },
    #[error("segment needs t < t', got t = {t}, t' = {t_end}")]
    EmptySegment { t: String, t_end: String },
    #[error("read error: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub action: String,
    pub timestamp: Rational,
}

impl Event {
    pub fn new(action: impl Into<String>, timestamp: Rational) -> Self {
        Event { action: action.into(), timestamp }
    }
}

/// A finite timed word. Timestamps are strictly increasing and positive; `τ₀ = 0` is implicit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimedWord {
    events: Vec<Event>,
}

/// Offset added to tied timestamps under `--perturb`.
pub fn perturbation_step() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(1_000_000_000u64))
}

/// Line reader validating monotonicity online.
pub struct WordReader<R> {
    lines: std::io::Lines<R>,
    line: usize,
    last_raw: Option<Rational>,
    last: Option<Rational>,
    perturb: bool,
}

impl<R: BufRead> WordReader<R> {
    pub fn new(reader: R) -> Self {
        WordReader { lines: reader.lines(), line: 0, last_raw: None, last: None, perturb: false }
    }

    /// Ties (and timestamps pushed behind by earlier ties) are moved just
    /// after the previous event instead of being rejected.
    pub fn with_perturb(mut self, perturb: bool) -> Self {
        self.perturb = perturb;
        self
    }

    fn parse_line(&mut self, text: &str) -> Result<Option<Event>, WordError> {
        let line = self.line;
        let body = text.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            return Ok(None);
        }
        let mut parts = body.split_whitespace();
        let action = parts.next().expect("non-empty");
        let stamp = parts
            .next()
            .ok_or_else(|| WordError::Syntax { line, message: format!("missing timestamp after `{action}`") })?;
        if let Some(extra) = parts.next() {
            return Err(WordError::Syntax { line, message: format!("unexpected `{extra}`") });
        }
        if action == TERMINAL || action == SILENT || action == "ε" {
            return Err(WordError::Reserved { line, name: action.to_string() });
        }
        let raw = parse_rational(stamp).map_err(|e| WordError::Syntax { line, message: e.to_string() })?;
        if raw <= Rational::default() {
            return Err(WordError::NonPositive { line, got: stamp.to_string() });
        }
        let timestamp = match &self.last {
            Some(prev) if raw <= *prev => {
                let tie = self.last_raw.as_ref().is_some_and(|r| raw >= *r);
                if self.perturb && tie {
                    prev + perturbation_step()
                } else {
                    return Err(WordError::NonIncreasing {
                        line,
                        previous: format_timestamp(prev),
                        got: stamp.to_string(),
                    });
                }
            }
            _ => raw.clone(),
        };
        self.last_raw = Some(raw);
        self.last = Some(timestamp.clone());
        Ok(Some(Event::new(action, timestamp)))
    }
}

impl<R: BufRead> Iterator for WordReader<R> {
    type Item = Result<Event, WordError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let text = match self.lines.next()? {
                Ok(t) => t,
                Err(e) => return Some(Err(WordError::Io(e.to_string()))),
            };
            self.line += 1;
            match self.parse_line(&text) {
                Ok(Some(ev)) => return Some(Ok(ev)),
                Ok(None) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

pub fn parse_word(text: &str) -> Result<TimedWord, WordError> {
    let events = WordReader::new(text.as_bytes()).collect::<Result<Vec<_>, _>>()?;
    Ok(TimedWord { events })
}

impl TimedWord {
    /// Builds a word, checking strict positivity and monotonicity.
    pub fn new(events: Vec<Event>) -> Result<Self, WordError> {
        let mut prev = Rational::default();
        for (i, ev) in events.iter().enumerate() {
            if ev.timestamp <= Rational::default() {
                return Err(WordError::NonPositive { line: i + 1, got: format_timestamp(&ev.timestamp) });
            }
            if i > 0 && ev.timestamp <= prev {
                return Err(WordError::NonIncreasing {
                    line: i + 1,
                    previous: format_timestamp(&prev),
                    got: format_timestamp(&ev.timestamp),
                });
            }
            if ev.action == TERMINAL || ev.action == SILENT {
                return Err(WordError::Reserved { line: i + 1, name: ev.action.clone() });
            }
            prev = ev.timestamp.clone();
        }
        Ok(TimedWord { events })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// `τᵢ` with the sentinel `τ₀ = 0`; indices are 1-based.
    pub fn tau(&self, i: usize) -> Rational {
        if i == 0 {
            Rational::default()
        } else {
            self.events[i - 1].timestamp.clone()
        }
    }

    pub fn to_text(&self) -> String {
        self.events.iter().map(|e| format!("{} {}\n", e.action, format_timestamp(&e.timestamp))).collect()
    }

    /// `w|₍t,t′₎`: events strictly after `t` and strictly before `t′`, shifted
    /// by `−t`, followed by `($, t′ − t)`.
    pub fn segment(&self, t: &Rational, t_end: &Rational) -> Result<Vec<(Symbol, Rational)>, WordError> {
        if t >= t_end || *t < Rational::default() {
            return Err(WordError::EmptySegment { t: format_timestamp(t), t_end: format_timestamp(t_end) });
        }
        // i: first index with τᵢ > t; j: last index with τⱼ < t′
        let i = self.events.partition_point(|e| e.timestamp <= *t);
        let j = self.events.partition_point(|e| e.timestamp < *t_end);
        let mut out: Vec<(Symbol, Rational)> =
            self.events[i..j.max(i)].iter().map(|e| (Symbol::Action(e.action.clone()), &e.timestamp - t)).collect();
        out.push((Symbol::Terminal, t_end - t));
        Ok(out)
    }

    /// `w + s`: every timestamp shifted by `s`.
    pub fn shifted(&self, s: &Rational) -> Vec<Event> {
        self.events.iter().map(|e| Event::new(e.action.clone(), &e.timestamp + s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rational::rat;

    pub(crate) const FIG1B: &str = "a 0.5\na 0.9\nb 1.3\nb 1.7\na 2.8\na 3.7\na 4.9\na 5.3\na 6.0\n";

    #[test]
    fn fig1b_word() {
        let w = parse_word(FIG1B).unwrap();
        assert_eq!(w.len(), 9);
        assert_eq!(w.events()[0], Event::new("a", rat(1, 2)));
        assert_eq!(w.events()[8], Event::new("a", rat(6, 1)));
    }

    #[test]
    fn fig3_word_with_comments() {
        let w = parse_word("# running example\na 0.7\n\na 2.0 # second\na 4.1\n").unwrap();
        let stamps: Vec<Rational> = w.events().iter().map(|e| e.timestamp.clone()).collect();
        assert_eq!(stamps, vec![rat(7, 10), rat(2, 1), rat(41, 10)]);
    }

    #[test]
    fn monotonicity_is_enforced() {
        let err = parse_word("a 1.0\nb 1.0\n").unwrap_err();
        assert!(matches!(err, WordError::NonIncreasing { line: 2, .. }));
        assert!(matches!(parse_word("a 0\n").unwrap_err(), WordError::NonPositive { line: 1, .. }));
        assert!(matches!(parse_word("$ 1\n").unwrap_err(), WordError::Reserved { .. }));
        assert!(matches!(parse_word("a\n").unwrap_err(), WordError::Syntax { line: 1, .. }));
    }

    #[test]
    fn perturb_breaks_ties() {
        let events: Vec<Event> = WordReader::new("a 1.0\nb 1.0\nc 1.0\nd 2\n".as_bytes())
            .with_perturb(true)
            .collect::<Result<_, _>>()
            .unwrap();
        let w = TimedWord::new(events).unwrap();
        assert_eq!(w.tau(2), rat(1, 1) + perturbation_step());
        assert_eq!(w.tau(3), rat(1, 1) + perturbation_step() * rat(2, 1));
        let err = WordReader::new("a 2\nb 1\n".as_bytes()).with_perturb(true).collect::<Result<Vec<_>, _>>();
        assert!(err.is_err());
    }

    #[test]
    fn segment_of_fig1b() {
        let w = parse_word(FIG1B).unwrap();
        let seg = w.segment(&rat(38, 10), &rat(61, 10)).unwrap();
        assert_eq!(
            seg,
            vec![
                (Symbol::Action("a".into()), rat(11, 10)),
                (Symbol::Action("a".into()), rat(15, 10)),
                (Symbol::Action("a".into()), rat(22, 10)),
                (Symbol::Terminal, rat(23, 10)),
            ]
        );
        assert_eq!(w.segment(&rat(0, 1), &rat(1, 10)).unwrap(), vec![(Symbol::Terminal, rat(1, 10))]);
        assert!(w.segment(&rat(2, 1), &rat(2, 1)).is_err());
        // an event exactly at t' is outside the segment
        assert_eq!(w.segment(&rat(58, 10), &rat(6, 1)).unwrap().len(), 1);
    }

    #[test]
    fn text_round_trip() {
        let w = parse_word(FIG1B).unwrap();
        assert_eq!(parse_word(&w.to_text()).unwrap(), w);
    }
}
