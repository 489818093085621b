use std::collections::HashMap;

use unicode_normalization::UnicodeNormalization;

use super::{Atom, CharClass, Direction, RewriteRule, RewriteRuleSet, RuleError};

const DIRECTION_DIRECTIVE: &str = "# direction:";

pub(super) fn parse(text: &str) -> Result<RewriteRuleSet, RuleError> {
    let mut classes: Vec<CharClass> = Vec::new();
    let mut class_index: HashMap<String, usize> = HashMap::new();
    let mut raw_rules = Vec::new();
    let mut direction = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line: String = raw.trim_end_matches('\r').nfc().collect();
        let line = line.trim();
        if let Some(rest) = line.strip_prefix(DIRECTION_DIRECTIVE) {
            direction = Some(parse_direction(rest, line_no, line)?);
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with("::") && line.contains(" = ") {
            let class = parse_class(line, line_no)?;
            if class_index.contains_key(&class.name) {
                return Err(RuleError::DuplicateClass {
                    line: line_no,
                    name: class.name,
                });
            }
            class_index.insert(class.name.clone(), classes.len());
            classes.push(class);
            continue;
        }
        raw_rules.push((line_no, line.to_string()));
    }

    let mut rules = Vec::with_capacity(raw_rules.len());
    for (line_no, line) in raw_rules {
        let rule = parse_rule(&line, line_no, rules.len(), &class_index)?;
        rules.push(rule);
    }
    Ok(RewriteRuleSet::from_parts(classes, rules, direction))
}

fn malformed(line: usize, text: &str, reason: &str) -> RuleError {
    RuleError::Malformed {
        line,
        text: text.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_direction(rest: &str, line_no: usize, line: &str) -> Result<Direction, RuleError> {
    let (from, to) = rest
        .split_once("->")
        .ok_or_else(|| malformed(line_no, line, "direction must read `from -> to`"))?;
    let (from, to) = (from.trim(), to.trim());
    if from.is_empty() || to.is_empty() {
        return Err(malformed(line_no, line, "direction must read `from -> to`"));
    }
    Ok(Direction {
        source: from.to_string(),
        target: to.to_string(),
    })
}

fn parse_class(line: &str, line_no: usize) -> Result<CharClass, RuleError> {
    let (lhs, rhs) = line.split_once(" = ").expect("checked by caller");
    let name = lhs
        .strip_prefix("::")
        .and_then(|s| s.strip_suffix("::"))
        .filter(|n| is_identifier(n))
        .ok_or_else(|| malformed(line_no, line, "class name must look like ::NAME::"))?;
    let members: Vec<String> = rhs.split_whitespace().map(str::to_string).collect();
    if members.is_empty() {
        return Err(malformed(line_no, line, "class has no members"));
    }
    Ok(CharClass {
        name: name.to_string(),
        members,
    })
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

fn parse_rule(
    line: &str,
    line_no: usize,
    index: usize,
    classes: &HashMap<String, usize>,
) -> Result<RewriteRule, RuleError> {
    let (lhs, rhs) = line
        .split_once("->")
        .ok_or_else(|| malformed(line_no, line, "expected `PATTERN -> REPLACEMENT`"))?;
    let lhs = lhs.trim();
    if lhs.is_empty() {
        return Err(malformed(line_no, line, "empty pattern"));
    }
    let rhs = rhs.trim();
    let (replacement, context) = match rhs.split_once(" / ") {
        Some((r, c)) => (r.trim(), Some(c.trim())),
        None => match rhs.strip_suffix(" /") {
            Some(_) => return Err(malformed(line_no, line, "empty context after `/`")),
            None => (rhs, None),
        },
    };
    if replacement.is_empty() {
        return Err(malformed(line_no, line, "missing replacement (write 0 for deletion)"));
    }
    if replacement.contains(char::is_whitespace) {
        return Err(malformed(line_no, line, "replacement contains whitespace"));
    }
    let replacement = if replacement == "0" { "" } else { replacement };

    let pattern = parse_atoms(lhs, line_no, line, classes, false)?;
    let (left, right) = match context {
        None => (Vec::new(), Vec::new()),
        Some(ctx) => {
            let parts: Vec<&str> = ctx.split_whitespace().collect();
            let holes: Vec<usize> = parts
                .iter()
                .enumerate()
                .filter(|(_, p)| **p == "_")
                .map(|(i, _)| i)
                .collect();
            let [hole] = holes[..] else {
                return Err(malformed(line_no, line, "context needs exactly one `_`"));
            };
            let left = parse_atoms(&parts[..hole].concat(), line_no, line, classes, true)?;
            let right = parse_atoms(&parts[hole + 1..].concat(), line_no, line, classes, true)?;
            (left, right)
        }
    };

    Ok(RewriteRule {
        pattern,
        replacement: replacement.to_string(),
        left,
        right,
        index,
        line: line_no,
        source: line.to_string(),
    })
}

fn parse_atoms(
    expr: &str,
    line_no: usize,
    line: &str,
    classes: &HashMap<String, usize>,
    allow_boundary: bool,
) -> Result<Vec<Atom>, RuleError> {
    let mut atoms = Vec::new();
    let mut literal: Vec<char> = Vec::new();
    let mut rest = expr;
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix("::") {
            let end = after
                .find("::")
                .ok_or_else(|| malformed(line_no, line, "unterminated ::CLASS:: reference"))?;
            let name = &after[..end];
            if !is_identifier(name) {
                return Err(malformed(line_no, line, "invalid class name"));
            }
            let &idx = classes.get(name).ok_or_else(|| RuleError::UndefinedClass {
                line: line_no,
                name: name.to_string(),
            })?;
            if !literal.is_empty() {
                atoms.push(Atom::Text(std::mem::take(&mut literal)));
            }
            atoms.push(Atom::Class(idx));
            rest = &after[end + 2..];
            continue;
        }
        let c = rest.chars().next().expect("non-empty");
        rest = &rest[c.len_utf8()..];
        if c == '#' {
            if !allow_boundary {
                return Err(malformed(line_no, line, "`#` is only allowed in contexts"));
            }
            if !literal.is_empty() {
                atoms.push(Atom::Text(std::mem::take(&mut literal)));
            }
            atoms.push(Atom::Boundary);
        } else {
            literal.push(c);
        }
    }
    if !literal.is_empty() {
        atoms.push(Atom::Text(literal));
    }
    Ok(atoms)
}
