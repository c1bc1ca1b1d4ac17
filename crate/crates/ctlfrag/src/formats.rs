//! Line-oriented text formats for Kripke structures, relational
//! structures, decompositions and p-PW-SAT instances, and an s-expression
//! syntax for MSO formulas.
//!
//! Blank lines and everything after `#` are ignored in the line formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use ctlfrag_core::ctl::{is_valid_prop_name, parse_formula};
use ctlfrag_core::decomposition::{Decomposition, Shape};
use ctlfrag_core::kripke::KripkeStructure;
use ctlfrag_core::mso::{Mso, MsoFormula};
use ctlfrag_core::reductions::PwSatInstance;
use ctlfrag_core::structure::{RelationalStructure, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    /// 1-based; 0 for problems not tied to a line.
    pub line: usize,
    pub message: String,
}

fn error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

/// `(line number, words)` of every non-empty line.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn number(line: usize, word: &str) -> Result<usize, FormatError> {
    word.parse()
        .map_err(|_| error(line, format!("expected a number, found {word:?}")))
}

/// Text after the first `skip` words of `raw`, trimmed.
fn rest_of_line(raw: &str, skip: usize) -> &str {
    let mut rest = raw.split('#').next().unwrap_or("").trim_start();
    for _ in 0..skip {
        rest = rest.trim_start();
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        rest = &rest[end..];
    }
    rest.trim()
}

/// ```text
/// worlds 3
/// props p q
/// edge 0 1
/// label 1 p
/// ```
///
/// `props` is optional; labels declare their propositions.
pub fn parse_kripke(text: &str) -> Result<KripkeStructure, FormatError> {
    let mut k: Option<KripkeStructure> = None;
    for (line, words) in lines(text) {
        let world = |k: &KripkeStructure, word: &str| -> Result<usize, FormatError> {
            let w = number(line, word)?;
            if w >= k.world_count() {
                return Err(error(line, format!("world {w} out of range")));
            }
            Ok(w)
        };
        match (words[0], k.as_mut()) {
            ("worlds", None) if words.len() == 2 => {
                k = Some(KripkeStructure::new(number(line, words[1])?))
            }
            ("worlds", Some(_)) => return Err(error(line, "duplicate worlds line")),
            (_, None) => return Err(error(line, "the first line must be `worlds N`")),
            ("props", Some(k)) => {
                for p in &words[1..] {
                    check_prop(line, p)?;
                    k.declare_proposition(*p);
                }
            }
            ("edge", Some(k)) if words.len() == 3 => {
                let (from, to) = (world(k, words[1])?, world(k, words[2])?);
                k.add_edge(from, to);
            }
            ("label", Some(k)) if words.len() >= 2 => {
                let w = world(k, words[1])?;
                for p in &words[2..] {
                    check_prop(line, p)?;
                    k.declare_proposition(*p);
                    k.set_label(w, *p);
                }
            }
            _ => {
                return Err(error(
                    line,
                    format!("malformed line starting with {:?}", words[0]),
                ))
            }
        }
    }
    let k = k.ok_or_else(|| error(0, "missing `worlds N` line"))?;
    k.validate().map_err(|v| error(0, v.to_string()))?;
    Ok(k)
}

fn check_prop(line: usize, p: &str) -> Result<(), FormatError> {
    if is_valid_prop_name(p) {
        Ok(())
    } else {
        Err(error(
            line,
            format!("{p:?} is not a valid proposition name"),
        ))
    }
}

pub fn write_kripke(k: &KripkeStructure) -> String {
    let mut out = format!("worlds {}\n", k.world_count());
    if !k.propositions().is_empty() {
        let props: Vec<&str> = k.propositions().iter().map(String::as_str).collect();
        let _ = writeln!(out, "props {}", props.join(" "));
    }
    for w in 0..k.world_count() {
        for v in k.successors(w) {
            let _ = writeln!(out, "edge {w} {v}");
        }
    }
    for w in 0..k.world_count() {
        if !k.labels(w).is_empty() {
            let labels: Vec<&str> = k.labels(w).iter().map(String::as_str).collect();
            let _ = writeln!(out, "label {w} {}", labels.join(" "));
        }
    }
    out
}

/// ```text
/// pred E 2          # extra predicates beyond the CTL vocabulary
/// element 0 EX p    # index, then the name up to the end of the line
/// rel body_EX 1 0
/// ```
///
/// Elements must be listed in index order before they are used.
pub fn parse_structure(text: &str) -> Result<RelationalStructure, FormatError> {
    let mut vocabulary = Vocabulary::ctl();
    let mut a: Option<RelationalStructure> = None;
    let raw_lines: Vec<&str> = text.lines().collect();
    for (line, words) in lines(text) {
        match words[0] {
            "pred" if words.len() == 3 => {
                if a.is_some() {
                    return Err(error(line, "predicates must be declared before elements"));
                }
                vocabulary
                    .declare(words[1], number(line, words[2])?)
                    .map_err(|e| error(line, e.to_string()))?;
            }
            "element" if words.len() >= 3 => {
                let a = a.get_or_insert_with(|| RelationalStructure::new(vocabulary.clone()));
                let index = number(line, words[1])?;
                if index != a.universe_size() {
                    return Err(error(
                        line,
                        format!("expected element {}, found {index}", a.universe_size()),
                    ));
                }
                a.add_element(rest_of_line(raw_lines[line - 1], 2));
            }
            "rel" if words.len() >= 2 => {
                let a = a.get_or_insert_with(|| RelationalStructure::new(vocabulary.clone()));
                let tuple = words[2..]
                    .iter()
                    .map(|w| number(line, w))
                    .collect::<Result<Vec<_>, _>>()?;
                a.insert(words[1], &tuple)
                    .map_err(|e| error(line, e.to_string()))?;
            }
            _ => {
                return Err(error(
                    line,
                    format!("malformed line starting with {:?}", words[0]),
                ))
            }
        }
    }
    Ok(a.unwrap_or_else(|| RelationalStructure::new(vocabulary)))
}

pub fn write_structure(a: &RelationalStructure) -> String {
    let mut out = String::new();
    let ctl = Vocabulary::ctl();
    for (name, arity) in a.vocabulary().iter() {
        if ctl.arity(name) != Some(arity) {
            let _ = writeln!(out, "pred {name} {arity}");
        }
    }
    for e in 0..a.universe_size() {
        let _ = writeln!(out, "element {e} {}", a.element_name(e));
    }
    for (name, tuple) in a.tuples() {
        let args: Vec<String> = tuple.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "rel {name} {}", args.join(" "));
    }
    out
}

/// ```text
/// path              # or `tree`
/// bag 0: 0 1 2
/// bag 1: 1 3
/// link 0 1          # trees only
/// ```
pub fn parse_decomposition(text: &str) -> Result<Decomposition, FormatError> {
    let mut shape: Option<bool> = None;
    let mut bags: Vec<BTreeSet<usize>> = Vec::new();
    let mut links = Vec::new();
    for (line, words) in lines(text) {
        match (words[0], shape) {
            ("path", None) | ("tree", None) if words.len() == 1 => shape = Some(words[0] == "tree"),
            (_, None) => return Err(error(line, "the first line must be `path` or `tree`")),
            ("bag", Some(_)) if words.len() >= 2 => {
                let label = words[1]
                    .strip_suffix(':')
                    .ok_or_else(|| error(line, "expected `bag i:`"))?;
                let index = number(line, label)?;
                if index != bags.len() {
                    return Err(error(
                        line,
                        format!("expected bag {}, found {index}", bags.len()),
                    ));
                }
                bags.push(
                    words[2..]
                        .iter()
                        .map(|w| number(line, w))
                        .collect::<Result<_, _>>()?,
                );
            }
            ("link", Some(true)) if words.len() == 3 => {
                links.push((number(line, words[1])?, number(line, words[2])?));
            }
            _ => {
                return Err(error(
                    line,
                    format!("malformed line starting with {:?}", words[0]),
                ))
            }
        }
    }
    match shape {
        None => Err(error(0, "empty decomposition")),
        Some(false) => Ok(Decomposition::path(bags)),
        Some(true) => Ok(Decomposition::tree(bags, links)),
    }
}

pub fn write_decomposition(d: &Decomposition) -> String {
    let mut out = String::from(if d.is_path() { "path\n" } else { "tree\n" });
    for (i, bag) in d.bags().iter().enumerate() {
        let items: Vec<String> = bag.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "bag {i}: {}", items.join(" "));
    }
    if let Shape::Tree(links) = d.shape() {
        for (x, y) in links {
            let _ = writeln!(out, "link {x} {y}");
        }
    }
    out
}

/// ```text
/// formula x1 | x2
/// part x1 1
/// part x2 1
/// tg 1 1
/// ```
pub fn parse_pwsat(text: &str) -> Result<PwSatInstance, FormatError> {
    let mut formula = None;
    let mut part = BTreeMap::new();
    let mut targets = BTreeMap::new();
    let raw_lines: Vec<&str> = text.lines().collect();
    for (line, words) in lines(text) {
        match words[0] {
            "formula" if formula.is_none() => {
                let f = parse_formula(rest_of_line(raw_lines[line - 1], 1))
                    .map_err(|e| error(line, e.to_string()))?;
                formula = Some(f);
            }
            "part" if words.len() == 3 => {
                if part
                    .insert(words[1].to_string(), number(line, words[2])?)
                    .is_some()
                {
                    return Err(error(line, format!("variable {} listed twice", words[1])));
                }
            }
            "tg" if words.len() == 3 => {
                if targets
                    .insert(number(line, words[1])?, number(line, words[2])?)
                    .is_some()
                {
                    return Err(error(line, format!("part {} has two targets", words[1])));
                }
            }
            _ => {
                return Err(error(
                    line,
                    format!("malformed line starting with {:?}", words[0]),
                ))
            }
        }
    }
    let formula = formula.ok_or_else(|| error(0, "missing `formula` line"))?;
    PwSatInstance::new(formula, part, targets).map_err(|e| error(0, e.to_string()))
}

pub fn write_pwsat(inst: &PwSatInstance) -> String {
    let mut out = format!("formula {}\n", inst.formula());
    for (v, p) in inst.partition() {
        let _ = writeln!(out, "part {v} {p}");
    }
    for (p, t) in inst.targets() {
        let _ = writeln!(out, "tg {p} {t}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn read_sexp(text: &str) -> Result<Sexp, FormatError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut line = 1;
    let mut word = String::new();
    let flush = |word: &mut String, stack: &mut Vec<Vec<Sexp>>| {
        if !word.is_empty() {
            stack
                .last_mut()
                .expect("open list")
                .push(Sexp::Atom(std::mem::take(word)));
        }
    };
    let mut comment = false;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            comment = false;
        }
        if comment {
            continue;
        }
        match c {
            ';' => {
                flush(&mut word, &mut stack);
                comment = true;
            }
            '(' => {
                flush(&mut word, &mut stack);
                stack.push(Vec::new());
            }
            ')' => {
                flush(&mut word, &mut stack);
                if stack.len() == 1 {
                    return Err(error(line, "unbalanced `)`"));
                }
                let items = stack.pop().expect("nested list");
                stack.last_mut().expect("open list").push(Sexp::List(items));
            }
            c if c.is_whitespace() => flush(&mut word, &mut stack),
            c => word.push(c),
        }
    }
    flush(&mut word, &mut stack);
    if stack.len() != 1 {
        return Err(error(line, "unclosed `(`"));
    }
    let mut top = stack.pop().expect("top level");
    match top.len() {
        1 => Ok(top.pop().expect("one item")),
        0 => Err(error(line, "empty formula")),
        _ => Err(error(line, "expected a single formula")),
    }
}

fn name(s: &Sexp) -> Result<&str, FormatError> {
    match s {
        Sexp::Atom(a) => Ok(a.as_str()),
        Sexp::List(_) => Err(error(0, "expected a name")),
    }
}

fn to_mso(s: &Sexp) -> Result<Mso, FormatError> {
    let bad = |m: String| error(0, m);
    match s {
        Sexp::Atom(a) if a == "true" => Ok(MsoFormula::truth()),
        Sexp::Atom(a) if a == "false" => Ok(MsoFormula::falsity()),
        Sexp::Atom(a) => Err(bad(format!("unexpected atom {a:?}"))),
        Sexp::List(items) => {
            let (head, args) = items
                .split_first()
                .ok_or_else(|| bad("empty list".into()))?;
            let head = name(head)?;
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(bad(format!("({head} ...) takes {n} arguments")))
                }
            };
            Ok(match head {
                "not" => {
                    arity(1)?;
                    MsoFormula::not(to_mso(&args[0])?)
                }
                "and" | "or" => {
                    let items = args.iter().map(to_mso).collect::<Result<Vec<_>, _>>()?;
                    if head == "and" {
                        Arc::new(MsoFormula::And(items))
                    } else {
                        Arc::new(MsoFormula::Or(items))
                    }
                }
                "implies" | "iff" => {
                    arity(2)?;
                    let (a, b) = (to_mso(&args[0])?, to_mso(&args[1])?);
                    if head == "implies" {
                        MsoFormula::implies(a, b)
                    } else {
                        MsoFormula::iff(a, b)
                    }
                }
                "exists" | "forall" | "exists-set" | "forall-set" => {
                    arity(2)?;
                    let (x, body) = (name(&args[0])?, to_mso(&args[1])?);
                    match head {
                        "exists" => MsoFormula::exists(x, body),
                        "forall" => MsoFormula::forall(x, body),
                        "exists-set" => MsoFormula::exists_set(x, body),
                        _ => MsoFormula::forall_set(x, body),
                    }
                }
                "=" => {
                    arity(2)?;
                    MsoFormula::eq(name(&args[0])?, name(&args[1])?)
                }
                "in" => {
                    arity(2)?;
                    MsoFormula::member(name(&args[0])?, name(&args[1])?)
                }
                predicate => {
                    let vars = args.iter().map(name).collect::<Result<Vec<_>, _>>()?;
                    MsoFormula::atom(predicate, &vars)
                }
            })
        }
    }
}

/// Reads the syntax printed by `MsoFormula`'s `Display`. `;` starts a
/// comment.
pub fn parse_mso(text: &str) -> Result<Mso, FormatError> {
    to_mso(&read_sexp(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kripke_round_trip() {
        let text = "# two worlds\nworlds 2\nprops p q\nedge 0 1\nedge 1 1\nlabel 1 p\n";
        let k = parse_kripke(text).unwrap();
        assert_eq!(k.world_count(), 2);
        assert_eq!(k.propositions().len(), 2);
        assert_eq!(parse_kripke(&write_kripke(&k)).unwrap(), k);
    }

    #[test]
    fn kripke_errors() {
        assert_eq!(parse_kripke("edge 0 1").unwrap_err().line, 1);
        assert_eq!(parse_kripke("worlds 1\nedge 0 4").unwrap_err().line, 2);
        assert!(parse_kripke("worlds 1\n")
            .unwrap_err()
            .message
            .contains("no successor"));
        assert!(parse_kripke("worlds 1\nedge 0 0\nlabel 0 AX").is_err());
    }

    #[test]
    fn structure_round_trip() {
        let text = "pred E 2\nelement 0 a b\nelement 1 c\nrel E 0 1\nrel repr 1\n";
        let a = parse_structure(text).unwrap();
        assert_eq!(a.element_name(0), "a b");
        assert!(a.contains("E", &[0, 1]));
        assert_eq!(parse_structure(&write_structure(&a)).unwrap(), a);
        assert!(parse_structure("element 1 x").is_err());
        assert!(parse_structure("element 0 x\nrel E 0 0").is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let d = parse_decomposition("tree\nbag 0: 0 1\nbag 1: 1 2\nlink 0 1\n").unwrap();
        assert!(!d.is_path());
        assert_eq!(parse_decomposition(&write_decomposition(&d)).unwrap(), d);
        let p = parse_decomposition("path\nbag 0: 0\nbag 1:\n").unwrap();
        assert_eq!(p.bags().len(), 2);
        assert!(parse_decomposition("path\nlink 0 1").is_err());
    }

    #[test]
    fn pwsat_round_trip() {
        let inst =
            parse_pwsat("formula x1 | x2  # clause\npart x1 1\npart x2 1\ntg 1 1\n").unwrap();
        assert_eq!(inst.variable_count(), 2);
        assert_eq!(parse_pwsat(&write_pwsat(&inst)).unwrap(), inst);
        assert!(parse_pwsat("formula x1\npart x1 1\ntg 1 2").is_err());
        assert!(parse_pwsat("part x1 1\ntg 1 0").is_err());
    }

    #[test]
    fn mso_round_trip() {
        let text = "(exists-set X (forall x (implies (P x) (and (in X x) (not (= x x)) true))))";
        let f = parse_mso(text).unwrap();
        assert_eq!(f.to_string(), text);
        assert_eq!(
            parse_mso("; comment\n(E x y)").unwrap().to_string(),
            "(E x y)"
        );
        assert!(parse_mso("(not a b)").is_err());
        assert!(parse_mso("(and").is_err());
        assert!(parse_mso("x").is_err());
    }
}
