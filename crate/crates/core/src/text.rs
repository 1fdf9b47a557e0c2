//! The plain-text brick format, instruction prompts, and LDraw export.
//!
//! Each line of the structure format describes one brick as
//! `{h}×{w} ({x},{y},{z})` — dimensions, a single space, then the position in
//! parentheses with no interior spaces. The separator is the Unicode
//! multiplication sign `×` (U+00D7); [`ParseMode::Lenient`] additionally
//! accepts ASCII `x` and tolerates stray whitespace, since generator
//! endpoints may emit either form.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::brick::{new_brick, Brick, BrickError, BrickLibrary, BrickStructure, GridWorld};

/// System prompt used for every instruction.
pub const SYSTEM_PROMPT: &str = "You are a helpful assistant.";

/// Instruction template; the caption is appended verbatim after the final newline.
pub const INSTRUCTION_TEMPLATE: &str = "Create a LEGO model of the input. Format your response as a list of bricks: <brick dimensions> <brick position>, where the brick position is (x,y,z).\n\nAllowed brick dimensions are 1\u{d7}1, 1\u{d7}2, 2\u{d7}1, 1\u{d7}4, 4\u{d7}1, 1\u{d7}6, 6\u{d7}1, 1\u{d7}8, 8\u{d7}1, 2\u{d7}2, 2\u{d7}4, 4\u{d7}2, 2\u{d7}6, 6\u{d7}2.\nAll bricks are 1 unit tall.\n\n### Input:\n";

/// Caption-generation prompt; `{CATEGORY_NAME}` is substituted throughout.
pub const CAPTION_PROMPT_TEMPLATE: &str = "This is a rendering of a 3D object built with LEGO bricks with 24 different views. The object belongs to the category of {CATEGORY_NAME}. You will generate five different captions for this {CATEGORY_NAME} that:\n\n1. Describes the core object/subject and its key geometric features\n\n2. Focuses on structure, geometry, and layout information\n\n3. Uses confident, concrete, and declarative language\n\n4. Omits color and texture information\n\n5. Excludes medium-related terms (model, render, design)\n\n6. Do not describe or reference each view individually.\n\n7. Focus on form over function. Describe the physical appearance of components rather than their purpose.\n\n8. Describe components in detail, including size, shape, and position relative to other components.\n\n9. The five captions should be from coarse to fine, with the first one being the most coarse-grained (e.g., a general description of the object, within 10 words) and the last one being the most fine-grained (e.g., a detailed description of the object, within 50 words). The five captions should be different from each other. Do not include any ordering numbers (e.g., 1, a, etc.).\n\n10. Describe the object using the category name \"{CATEGORY_NAME}\" or synonyms of the category name \"{CATEGORY_NAME}\".";

/// Length units per stud and per layer in LDraw coordinates.
pub const LDU_PER_STUD: i64 = 20;
pub const LDU_PER_LAYER: i64 = 24;

/// Default LDraw color code used when no per-brick colors are supplied.
pub const DEFAULT_LDRAW_COLOR: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    /// Accept exactly the grammar `<int>×<int> (<int>,<int>,<int>)`.
    #[default]
    Strict,
    /// Additionally accept ASCII `x`, surrounding whitespace, and spaces
    /// after the commas and opening parenthesis.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed brick line: {reason}")]
    MalformedLine { reason: &'static str },
    #[error(transparent)]
    Brick(#[from] BrickError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {error}")]
pub struct StructureParseError {
    /// 1-based line number of the first offending line.
    pub line: usize,
    pub error: ParseError,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("caption is empty")]
    EmptyCaption,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExportError {
    #[error("brick {index}: footprint {h}\u{d7}{w} has no library part metadata")]
    UnknownPart { index: usize, h: u32, w: u32 },
    #[error("expected {bricks} per-brick colors, got {colors}")]
    ColorCountMismatch { bricks: usize, colors: usize },
}

struct Scanner<'a> {
    rest: &'a str,
}

impl<'a> Scanner<'a> {
    fn new(s: &'a str) -> Self {
        Scanner { rest: s }
    }

    fn take_u32(&mut self) -> Result<u32, ParseError> {
        let digits = self.rest.as_bytes().iter().take_while(|b| b.is_ascii_digit()).count();
        if digits == 0 {
            return Err(ParseError::MalformedLine { reason: "expected an integer" });
        }
        let (num, rest) = self.rest.split_at(digits);
        self.rest = rest;
        num.parse::<u32>()
            .map_err(|_| ParseError::MalformedLine { reason: "integer out of range" })
    }

    fn take(&mut self, lit: &str, reason: &'static str) -> Result<(), ParseError> {
        match self.rest.strip_prefix(lit) {
            Some(rest) => {
                self.rest = rest;
                Ok(())
            }
            None => Err(ParseError::MalformedLine { reason }),
        }
    }

    fn skip_spaces(&mut self) {
        self.rest = self.rest.trim_start_matches(' ');
    }

    fn finish(&self, reason: &'static str) -> Result<(), ParseError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(ParseError::MalformedLine { reason })
        }
    }
}

/// Parses one brick line and validates the brick against the standard
/// library and the grid bounds.
pub fn parse_brick_line(line: &str, grid: &GridWorld) -> Result<Brick, ParseError> {
    parse_brick_line_with(line, grid, ParseMode::Strict)
}

pub fn parse_brick_line_with(line: &str, grid: &GridWorld, mode: ParseMode) -> Result<Brick, ParseError> {
    let lenient = mode == ParseMode::Lenient;
    let line = if lenient { line.trim() } else { line };
    let mut sc = Scanner::new(line);

    let h = sc.take_u32()?;
    match mode {
        ParseMode::Strict => sc.take("\u{d7}", "expected '\u{d7}' between dimensions")?,
        ParseMode::Lenient => {
            if sc.take("\u{d7}", "").is_err() {
                sc.take("x", "expected '\u{d7}' or 'x' between dimensions")?;
            }
        }
    }
    let w = sc.take_u32()?;
    sc.take(" ", "expected a single space before the position")?;
    sc.take("(", "expected '('")?;
    if lenient {
        sc.skip_spaces();
    }
    let x = sc.take_u32()?;
    sc.take(",", "expected ','")?;
    if lenient {
        sc.skip_spaces();
    }
    let y = sc.take_u32()?;
    sc.take(",", "expected ','")?;
    if lenient {
        sc.skip_spaces();
    }
    let z = sc.take_u32()?;
    if lenient {
        sc.skip_spaces();
    }
    sc.take(")", "expected ')'")?;
    sc.finish("trailing characters after the position")?;

    Ok(new_brick(h, w, x, y, z, grid)?)
}

/// Serializes one brick as `{h}×{w} ({x},{y},{z})` (no trailing newline).
pub fn serialize_brick(b: &Brick) -> String {
    format!("{}\u{d7}{} ({},{},{})", b.h(), b.w(), b.x, b.y, b.z)
}

/// One line per brick, each newline-terminated, in structure order.
pub fn serialize_structure(s: &BrickStructure) -> String {
    let mut out = String::new();
    for b in &s.bricks {
        out.push_str(&serialize_brick(b));
        out.push('\n');
    }
    out
}

/// Parses a serialized structure. A blank line terminates the structure;
/// non-blank content after the terminator is an error at that line.
pub fn parse_structure(text: &str, grid: &GridWorld) -> Result<BrickStructure, StructureParseError> {
    parse_structure_with(text, grid, ParseMode::Strict)
}

pub fn parse_structure_with(
    text: &str,
    grid: &GridWorld,
    mode: ParseMode,
) -> Result<BrickStructure, StructureParseError> {
    let mut s = BrickStructure::new(*grid);
    let mut terminated = false;
    for (i, line) in text.lines().enumerate() {
        let blank = line.trim().is_empty();
        if terminated && !blank {
            return Err(StructureParseError {
                line: i + 1,
                error: ParseError::MalformedLine { reason: "content after end of structure" },
            });
        }
        if blank {
            terminated = true;
            continue;
        }
        let brick = parse_brick_line_with(line, grid, mode)
            .map_err(|error| StructureParseError { line: i + 1, error })?;
        s.push(brick);
    }
    Ok(s)
}

/// A built instruction prompt: fixed system message plus the user template
/// with the caption substituted after `### Input:`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructionPrompt {
    pub system: String,
    pub user: String,
}

pub fn build_instruction_prompt(caption: &str) -> Result<InstructionPrompt, PromptError> {
    if caption.is_empty() {
        return Err(PromptError::EmptyCaption);
    }
    let mut user = String::with_capacity(INSTRUCTION_TEMPLATE.len() + caption.len());
    user.push_str(INSTRUCTION_TEMPLATE);
    user.push_str(caption);
    Ok(InstructionPrompt { system: SYSTEM_PROMPT.to_string(), user })
}

/// The caption-generation prompt for one object category.
pub fn build_caption_prompt(category: &str) -> String {
    CAPTION_PROMPT_TEMPLATE.replace("{CATEGORY_NAME}", category)
}

/// An LDraw model document: header comments plus one type-1 part line per brick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdrawDocument {
    pub header: Vec<String>,
    pub part_lines: Vec<String>,
}

impl LdrawDocument {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in self.header.iter().chain(self.part_lines.iter()) {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

/// Exports a structure as LDraw type-1 lines.
///
/// Coordinate mapping: `x_LDU = 20x + 10h`, `z_LDU = 20y + 10w`,
/// `y_LDU = -24(z+1)` (LDraw -Y is up, positions reference the part origin at
/// the top of the brick). Parts stored rotated relative to their canonical
/// footprint get a 90-degree rotation about the vertical axis.
pub fn export_ldraw(
    s: &BrickStructure,
    colors: Option<&[u32]>,
    library: &BrickLibrary,
) -> Result<LdrawDocument, ExportError> {
    if let Some(colors) = colors {
        if colors.len() != s.len() {
            return Err(ExportError::ColorCountMismatch { bricks: s.len(), colors: colors.len() });
        }
    }
    let header = alloc::vec![
        String::from("0 Brick structure"),
        String::from("0 Name: model.ldr"),
    ];
    let mut part_lines = Vec::with_capacity(s.len());
    for (index, b) in s.bricks.iter().enumerate() {
        let (entry, rotated) = library.lookup(b.dims).ok_or(ExportError::UnknownPart {
            index,
            h: b.h(),
            w: b.w(),
        })?;
        let color = colors.map_or(DEFAULT_LDRAW_COLOR, |c| c[index]);
        let x_ldu = LDU_PER_STUD * b.x as i64 + (LDU_PER_STUD / 2) * b.h() as i64;
        let z_ldu = LDU_PER_STUD * b.y as i64 + (LDU_PER_STUD / 2) * b.w() as i64;
        let y_ldu = -LDU_PER_LAYER * (b.z as i64 + 1);
        let rot = if rotated { "0 0 -1 0 1 0 1 0 0" } else { "1 0 0 0 1 0 0 0 1" };
        part_lines.push(format!(
            "1 {} {} {} {} {} {}.dat",
            color, x_ldu, y_ldu, z_ldu, rot, entry.ldraw_part_id
        ));
    }
    Ok(LdrawDocument { header, part_lines })
}
