//! Template-directive masking.
//!
//! Helm templates are not well-formed YAML until rendered. Before parsing,
//! every `{{ ... }}` span is replaced by a quoted placeholder scalar
//! (`"⟦Dk⟧"`) so the file parses as plain YAML while the original
//! directive text stays recoverable through the token table. Lines that
//! consist solely of directives — typically `{{- if ... }}` control lines —
//! are replaced by comment lines of equal length, so masking never changes
//! the number of lines or shifts content across lines.

use std::path::Path;

use crate::model::{SourceSpan, PLACEHOLDER_CLOSE, PLACEHOLDER_OPEN};

/// One `{{ ... }}` span found in a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectiveToken {
    /// Dense identifier (`D0`, `D1`, ...) in source order within the file.
    pub id: String,
    /// Verbatim directive text including the delimiters.
    pub original_text: String,
    pub span: SourceSpan,
    /// True when the directive mentions `.Values`.
    pub references_values: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MaskError {
    #[error("unbalanced template directive at line {line}, column {col}: no closing '}}}}'")]
    UnbalancedDirective { line: u32, col: u32 },
}

/// Result of masking one file.
#[derive(Debug, Clone)]
pub struct MaskOutcome {
    pub masked_text: String,
    pub tokens: Vec<DirectiveToken>,
    /// Per-line column edits (masked → original), for span back-mapping.
    line_edits: Vec<Vec<EditMap>>,
}

/// One in-line replacement, as 0-based exclusive character column ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct EditMap {
    masked_start: usize,
    masked_end: usize,
    orig_start: usize,
    orig_end: usize,
}

impl MaskOutcome {
    /// Maps a 1-based column of a span start from masked to original
    /// coordinates. Positions inside a placeholder map to the start of the
    /// original directive.
    pub fn map_start_col(&self, line: u32, col: u32) -> u32 {
        self.map_col(line, col, false)
    }

    /// Maps a 1-based column of a span end (exclusive). Positions inside a
    /// placeholder map to the end of the original directive.
    pub fn map_end_col(&self, line: u32, col: u32) -> u32 {
        self.map_col(line, col, true)
    }

    fn map_col(&self, line: u32, col: u32, is_end: bool) -> u32 {
        let Some(edits) = self.line_edits.get(line as usize - 1) else {
            return col;
        };
        let pos = col as usize - 1;
        let mut shift: isize = 0;
        for e in edits {
            if pos < e.masked_start {
                break;
            }
            let inside_for_start = pos < e.masked_end;
            let inside_for_end = pos > e.masked_start && pos <= e.masked_end;
            if (!is_end && inside_for_start) || (is_end && inside_for_end && pos != e.masked_end) {
                let orig = if is_end { e.orig_end } else { e.orig_start };
                return orig as u32 + 1;
            }
            if pos < e.masked_end {
                // Start position sitting exactly on the edit end or an end
                // position at the edit start: treat as outside.
                break;
            }
            shift += (e.orig_end - e.orig_start) as isize - (e.masked_end - e.masked_start) as isize;
        }
        (pos as isize + shift) as u32 + 1
    }
}

/// Absolute position of one directive in a file, as 0-based line index and
/// 0-based character columns (end exclusive).
#[derive(Debug, Clone, Copy)]
struct RawToken {
    start_line: usize,
    start_col: usize,
    end_line: usize,
    end_col: usize,
}

#[derive(Debug, Clone)]
enum LinePlan {
    Keep,
    Comment,
    Edits(Vec<(usize, usize, String)>),
}

/// Replaces every `{{ ... }}` span in `text` with a placeholder while
/// preserving the line structure, and returns the collected tokens.
pub fn mask_directives(text: &str, file: &Path) -> Result<MaskOutcome, MaskError> {
    let trailing_newline = text.ends_with('\n');
    let lines: Vec<Vec<char>> = text.split('\n').map(|l| l.chars().collect()).collect();
    // split produces one trailing empty entry when the text ends with '\n'.
    let lines = if trailing_newline {
        lines[..lines.len() - 1].to_vec()
    } else {
        lines
    };

    let raw_tokens = scan_directives(&lines)?;

    let mut tokens = Vec::with_capacity(raw_tokens.len());
    let mut plans: Vec<LinePlan> = vec![LinePlan::Keep; lines.len()];

    for (k, raw) in raw_tokens.iter().enumerate() {
        let id = format!("D{k}");
        let original_text = slice_text(&lines, raw);
        tokens.push(DirectiveToken {
            references_values: original_text.contains(".Values"),
            span: SourceSpan::new(
                file,
                raw.start_line as u32 + 1,
                raw.start_col as u32 + 1,
                raw.end_line as u32 + 1,
                raw.end_col as u32 + 1,
            ),
            original_text,
            id: id.clone(),
        });

        let bare = format!("{PLACEHOLDER_OPEN}{id}{PLACEHOLDER_CLOSE}");
        let prefix = &lines[raw.start_line][..raw.start_col];
        if raw.start_line == raw.end_line {
            let suffix = &lines[raw.start_line][raw.end_col..];
            let placeholder = if stands_alone_left(prefix) && stands_alone_right(suffix) {
                format!("\"{bare}\"")
            } else {
                bare
            };
            push_edit(&mut plans[raw.start_line], raw.start_col, raw.end_col, placeholder);
        } else {
            let prefix_blank = prefix.iter().all(|c| c.is_whitespace());
            if prefix_blank {
                plans[raw.start_line] = LinePlan::Comment;
            } else {
                let placeholder = if stands_alone_left(prefix) {
                    format!("\"{bare}\"")
                } else {
                    bare
                };
                let len = lines[raw.start_line].len();
                push_edit(&mut plans[raw.start_line], raw.start_col, len, placeholder);
            }
            for plan in plans.iter_mut().take(raw.end_line + 1).skip(raw.start_line + 1) {
                *plan = LinePlan::Comment;
            }
        }
    }

    // A line whose entire non-whitespace content is directives cannot stand
    // as a scalar (e.g. control lines); comment it out instead.
    for (li, plan) in plans.iter_mut().enumerate() {
        if let LinePlan::Edits(edits) = plan {
            let covered = |p: usize| edits.iter().any(|(s, e, _)| p >= *s && p < *e);
            let only_directives = lines[li]
                .iter()
                .enumerate()
                .all(|(p, c)| c.is_whitespace() || covered(p));
            if only_directives {
                *plan = LinePlan::Comment;
            }
        }
    }

    let mut masked_lines: Vec<String> = Vec::with_capacity(lines.len());
    let mut line_edits: Vec<Vec<EditMap>> = Vec::with_capacity(lines.len());
    for (li, plan) in plans.iter().enumerate() {
        match plan {
            LinePlan::Keep => {
                masked_lines.push(lines[li].iter().collect());
                line_edits.push(Vec::new());
            }
            LinePlan::Comment => {
                let len = lines[li].len();
                let mut s = String::new();
                if len > 0 {
                    s.push('#');
                    s.extend(std::iter::repeat_n(' ', len - 1));
                }
                masked_lines.push(s);
                line_edits.push(Vec::new());
            }
            LinePlan::Edits(edits) => {
                let mut edits = edits.clone();
                edits.sort_by_key(|(s, _, _)| *s);
                let mut out = String::new();
                let mut maps = Vec::new();
                let mut cursor = 0usize; // original column
                let mut masked_col = 0usize;
                for (s, e, repl) in &edits {
                    let keep: String = lines[li][cursor..*s].iter().collect();
                    masked_col += keep.chars().count();
                    out.push_str(&keep);
                    let repl_len = repl.chars().count();
                    maps.push(EditMap {
                        masked_start: masked_col,
                        masked_end: masked_col + repl_len,
                        orig_start: *s,
                        orig_end: *e,
                    });
                    out.push_str(repl);
                    masked_col += repl_len;
                    cursor = *e;
                }
                out.extend(lines[li][cursor..].iter());
                masked_lines.push(out);
                line_edits.push(maps);
            }
        }
    }

    let mut masked_text = masked_lines.join("\n");
    if trailing_newline {
        masked_text.push('\n');
    }

    Ok(MaskOutcome {
        masked_text,
        tokens,
        line_edits,
    })
}

/// Whether the directive starts exactly where a YAML value (or list item)
/// would: at the line start, after `key: `, or after a `- ` item dash. In
/// those positions the placeholder is quoted so it stands as a scalar of
/// its own; anywhere else it has to merge into the surrounding scalar and
/// stays bare (`data-⟦D0⟧`).
fn stands_alone_left(prefix: &[char]) -> bool {
    let p: String = prefix.iter().collect();
    let trimmed = p.trim_end();
    if trimmed.is_empty() {
        return true;
    }
    let has_separator_space = p.len() > trimmed.len();
    has_separator_space
        && (trimmed.ends_with(':') || trimmed.trim_start() == "-" || trimmed.ends_with(" -"))
}

/// Whether nothing but whitespace or a comment follows the directive.
fn stands_alone_right(suffix: &[char]) -> bool {
    let s: String = suffix.iter().collect();
    let trimmed = s.trim_start();
    trimmed.is_empty() || (trimmed.starts_with('#') && s.len() > trimmed.len())
}

fn push_edit(plan: &mut LinePlan, start: usize, end: usize, repl: String) {
    match plan {
        LinePlan::Keep => *plan = LinePlan::Edits(vec![(start, end, repl)]),
        LinePlan::Edits(edits) => edits.push((start, end, repl)),
        LinePlan::Comment => {}
    }
}

/// Finds every balanced `{{ ... }}` span. The closing delimiter is looked
/// up outside of double-quoted and backtick strings so directive bodies
/// like `{{ printf "}}" }}` keep their full extent.
fn scan_directives(lines: &[Vec<char>]) -> Result<Vec<RawToken>, MaskError> {
    let mut tokens = Vec::new();
    let mut li = 0usize;
    let mut ci = 0usize;
    let at = |l: usize, c: usize| -> Option<char> { lines.get(l).and_then(|line| line.get(c)).copied() };
    while li < lines.len() {
        if ci + 1 >= lines[li].len() {
            li += 1;
            ci = 0;
            continue;
        }
        if lines[li][ci] == '{' && lines[li][ci + 1] == '{' {
            let (start_line, start_col) = (li, ci);
            let mut l = li;
            let mut c = ci + 2;
            let mut in_dq = false;
            let mut in_bt = false;
            let found = loop {
                if l >= lines.len() {
                    break None;
                }
                if c >= lines[l].len() {
                    l += 1;
                    c = 0;
                    continue;
                }
                let ch = lines[l][c];
                if in_dq {
                    match ch {
                        '\\' => c += 1,
                        '"' => in_dq = false,
                        _ => {}
                    }
                } else if in_bt {
                    if ch == '`' {
                        in_bt = false;
                    }
                } else {
                    match ch {
                        '"' => in_dq = true,
                        '`' => in_bt = true,
                        '}' if at(l, c + 1) == Some('}') => break Some((l, c + 2)),
                        _ => {}
                    }
                }
                c += 1;
            };
            let Some((end_line, end_col)) = found else {
                return Err(MaskError::UnbalancedDirective {
                    line: start_line as u32 + 1,
                    col: start_col as u32 + 1,
                });
            };
            tokens.push(RawToken {
                start_line,
                start_col,
                end_line,
                end_col,
            });
            li = end_line;
            ci = end_col;
        } else {
            ci += 1;
        }
    }
    Ok(tokens)
}

fn slice_text(lines: &[Vec<char>], raw: &RawToken) -> String {
    if raw.start_line == raw.end_line {
        lines[raw.start_line][raw.start_col..raw.end_col]
            .iter()
            .collect()
    } else {
        let mut out = String::new();
        out.extend(lines[raw.start_line][raw.start_col..].iter());
        for line in &lines[raw.start_line + 1..raw.end_line] {
            out.push('\n');
            out.extend(line.iter());
        }
        out.push('\n');
        out.extend(lines[raw.end_line][..raw.end_col].iter());
        out
    }
}
