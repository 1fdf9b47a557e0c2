//! Autoregressive brick generation with rejection sampling and physics-aware
//! rollback.
//!
//! The harness drives any [`BrickGenerator`]: a remote endpoint, a scripted
//! replay, or the deterministic greedy generator. One session loop:
//!
//! - draw one text line from the generator given the instruction prompt plus
//!   the serialized partial structure;
//! - parse and validity-check it (format, library, bounds, collision),
//!   resampling up to `max_rejections` times — the sampling temperature rises
//!   by `temperature_step` whenever a draw repeats an already-rejected line;
//! - on end-of-structure, run the stability analysis; an unstable result is
//!   rolled back to the prefix before its first unstable brick, repeatedly,
//!   until the prefix is stable, and generation resumes from there.
//!
//! A rejection loop that exhausts its budget is treated as a forced
//! end-of-structure; appending a known-invalid brick would break the
//! validity invariant that every intermediate structure is collision-free
//! and in bounds. The session ends when a completed structure is stable or
//! the rollback budget is spent; spent-budget results are returned flagged,
//! not discarded.

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::brick::{Brick, BrickLibrary, BrickStructure, GridWorld};
use crate::geometry::{self, OccupancyIndex, ValidityFailure, VoxelGrid};
use crate::legolize;
use crate::stability::{self, PhysicalParams, StabilityError, StabilityReport};
use crate::text::{self, InstructionPrompt, ParseMode, PromptError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationConfig {
    /// Base sampling temperature.
    pub temperature: f64,
    /// Added on every draw that repeats an already-rejected line.
    pub temperature_step: f64,
    /// Invalid draws tolerated per brick before forcing end-of-structure.
    pub max_rejections: u32,
    /// Rollback budget for the whole session.
    pub max_rollbacks: u32,
    pub grid: GridWorld,
    pub physics: PhysicalParams,
    /// Strict by default; lenient tolerates ASCII `x` and stray spaces.
    pub parse_mode: ParseMode,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            temperature: 0.6,
            temperature_step: 0.01,
            max_rejections: 30,
            max_rollbacks: 100,
            grid: GridWorld::default(),
            physics: PhysicalParams::default(),
            parse_mode: ParseMode::Strict,
        }
    }
}

/// Context handed to a generator on every draw: the instruction prompt and
/// the serialized partial structure. `full_text()` is their concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationContext<'a> {
    pub system: &'a str,
    pub user: &'a str,
    pub partial: &'a str,
}

impl GenerationContext<'_> {
    pub fn full_text(&self) -> String {
        let mut out = String::with_capacity(self.user.len() + self.partial.len() + 1);
        out.push_str(self.user);
        out.push('\n');
        out.push_str(self.partial);
        out
    }

    pub fn partial_line_count(&self) -> usize {
        self.partial.lines().count()
    }
}

/// One generator step: a text line or the end of the structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorEvent {
    Line(String),
    End,
}

/// Errors a generator may surface; the harness aborts the session on any of
/// them. Retry policies live inside the generator.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("generator transport failed: {0}")]
    Transport(String),
    #[error("generator authentication failed: {0}")]
    Auth(String),
    #[error("generator rate limit exhausted: {0}")]
    RateLimited(String),
}

/// A next-line predictor over brick text.
pub trait BrickGenerator {
    fn next_line(
        &mut self,
        context: &GenerationContext<'_>,
        temperature: f64,
    ) -> Result<GeneratorEvent, GeneratorError>;
}

/// Session observer for tracing; all callbacks default to no-ops.
pub trait SessionObserver {
    fn on_draw(&mut self, _temperature: f64, _line: Option<&str>) {}
    fn on_reject(&mut self, _line: &str, _reason: &ValidityFailure) {}
    fn on_accept(&mut self, _brick: &Brick, _rejections: u32) {}
    fn on_end_of_structure(&mut self, _forced: bool, _len: usize) {}
    fn on_rollback(&mut self, _unstable: &[usize], _prefix_len: usize) {}
}

/// Discards every event.
pub struct NoopObserver;

impl SessionObserver for NoopObserver {}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
}

/// Outcome of one rejection-sampling loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleOutcome {
    Accepted(Brick),
    EndOfStructure,
    /// The rejection budget was spent without a valid brick.
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenerationFlag {
    Stable,
    RollbackExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub structure: BrickStructure,
    pub report: StabilityReport,
    pub flag: GenerationFlag,
    /// Rollback truncations applied over the session.
    pub rollbacks: u32,
    /// Rejected draws per brick of the final structure.
    pub rejections: Vec<u32>,
    /// Draws requested from the generator, all outcomes included.
    pub total_draws: u32,
    /// Wall-clock session time in seconds; zero when timing is unavailable.
    pub wall_seconds: f64,
}

/// An in-flight generation session: the partial structure, its occupancy,
/// and the serialized context kept in sync.
pub struct Session<'a> {
    cfg: &'a GenerationConfig,
    prompt: InstructionPrompt,
    library: BrickLibrary,
    structure: BrickStructure,
    occupancy: OccupancyIndex,
    partial_text: String,
    rejections: Vec<u32>,
    total_draws: u32,
}

impl<'a> Session<'a> {
    pub fn new(prompt_text: &str, cfg: &'a GenerationConfig) -> Result<Self, GenerateError> {
        let prompt = text::build_instruction_prompt(prompt_text)?;
        Ok(Session {
            cfg,
            prompt,
            library: BrickLibrary::standard(),
            structure: BrickStructure::new(cfg.grid),
            occupancy: OccupancyIndex::new(&cfg.grid),
            partial_text: String::new(),
            rejections: Vec::new(),
            total_draws: 0,
        })
    }

    pub fn structure(&self) -> &BrickStructure {
        &self.structure
    }

    fn context(&self) -> GenerationContext<'_> {
        GenerationContext {
            system: &self.prompt.system,
            user: &self.prompt.user,
            partial: &self.partial_text,
        }
    }

    fn parse_and_check(&self, line: &str) -> Result<Brick, ValidityFailure> {
        match text::parse_brick_line_with(line, &self.cfg.grid, self.cfg.parse_mode) {
            Ok(brick) => {
                geometry::check_candidate(
                    brick.h(),
                    brick.w(),
                    brick.x,
                    brick.y,
                    brick.z,
                    &self.cfg.grid,
                    &self.library,
                    &self.occupancy,
                )?;
                Ok(brick)
            }
            Err(text::ParseError::MalformedLine { reason }) => {
                Err(ValidityFailure::Malformed { detail: reason.to_string() })
            }
            Err(text::ParseError::Brick(e)) => {
                // Bounds and library failures surface as their own kinds.
                match e {
                    crate::brick::BrickError::DimensionNotInLibrary { h, w } => {
                        Err(ValidityFailure::NotInLibrary { h, w })
                    }
                    crate::brick::BrickError::OutOfBounds { axis, .. } => {
                        Err(ValidityFailure::OutOfBounds { axis })
                    }
                }
            }
        }
    }

    /// Draws until a valid brick, end-of-structure, or an exhausted budget.
    /// The temperature starts at the configured base for every brick and
    /// escalates on draws that repeat an already-rejected line.
    pub fn rejection_sample(
        &mut self,
        generator: &mut dyn BrickGenerator,
        observer: &mut dyn SessionObserver,
    ) -> Result<SampleOutcome, GenerateError> {
        let mut temperature = self.cfg.temperature;
        let mut rejected_lines: Vec<String> = Vec::new();
        let mut rejections = 0u32;

        while rejections < self.cfg.max_rejections {
            let event = generator.next_line(&self.context(), temperature)?;
            self.total_draws += 1;
            match event {
                GeneratorEvent::End => {
                    observer.on_draw(temperature, None);
                    return Ok(SampleOutcome::EndOfStructure);
                }
                GeneratorEvent::Line(line) => {
                    observer.on_draw(temperature, Some(&line));
                    if rejected_lines.iter().any(|r| r == &line) {
                        temperature += self.cfg.temperature_step;
                    }
                    match self.parse_and_check(&line) {
                        Ok(brick) => {
                            let index = self.structure.len();
                            self.occupancy
                                .insert(index, &brick)
                                .expect("validity check precedes insertion");
                            self.structure.push(brick);
                            self.partial_text.push_str(&text::serialize_brick(&brick));
                            self.partial_text.push('\n');
                            self.rejections.push(rejections);
                            observer.on_accept(&brick, rejections);
                            return Ok(SampleOutcome::Accepted(brick));
                        }
                        Err(reason) => {
                            observer.on_reject(&line, &reason);
                            rejections += 1;
                            if !rejected_lines.contains(&line) {
                                rejected_lines.push(line);
                            }
                        }
                    }
                }
            }
        }
        Ok(SampleOutcome::Exhausted)
    }

    /// Truncates to the given prefix length, rebuilding occupancy and text.
    fn truncate(&mut self, len: usize) {
        for i in (len..self.structure.len()).rev() {
            let brick = self.structure.bricks[i];
            self.occupancy.remove(i, &brick);
        }
        self.structure.bricks.truncate(len);
        self.rejections.truncate(len);
        self.partial_text = text::serialize_structure(&self.structure);
    }
}

/// The prefix before the first unstable brick: `[b_1 .. b_(min I - 1)]`.
///
/// The caller re-analyzes and repeats; removing bricks can expose new
/// instability below (a counterweight may have been in the removed suffix).
pub fn rollback(s: &BrickStructure, report: &StabilityReport) -> BrickStructure {
    debug_assert!(!report.stable, "rollback requires an unstable report");
    let first = report.unstable.first().copied().unwrap_or(s.len());
    s.prefix(first)
}

/// Runs one full generation session against a generator.
pub fn generate_structure(
    generator: &mut dyn BrickGenerator,
    prompt: &str,
    cfg: &GenerationConfig,
    observer: &mut dyn SessionObserver,
) -> Result<GenerationResult, GenerateError> {
    if prompt.is_empty() {
        return Err(GenerateError::Prompt(PromptError::EmptyCaption));
    }
    #[cfg(feature = "std")]
    let start = std::time::Instant::now();

    let mut session = Session::new(prompt, cfg)?;
    let mut rollbacks = 0u32;

    let (report, flag) = loop {
        match session.rejection_sample(generator, observer)? {
            SampleOutcome::Accepted(_) => continue,
            outcome @ (SampleOutcome::EndOfStructure | SampleOutcome::Exhausted) => {
                observer.on_end_of_structure(
                    outcome == SampleOutcome::Exhausted,
                    session.structure.len(),
                );
                let mut report = stability::analyze(&session.structure, &cfg.physics)?;
                if report.stable {
                    break (report, GenerationFlag::Stable);
                }
                if rollbacks >= cfg.max_rollbacks {
                    break (report, GenerationFlag::RollbackExhausted);
                }
                // Roll back to a stable prefix, then resume generation.
                while !report.stable {
                    let prefix = rollback(&session.structure, &report);
                    observer.on_rollback(&report.unstable, prefix.len());
                    session.truncate(prefix.len());
                    rollbacks += 1;
                    report = stability::analyze(&session.structure, &cfg.physics)?;
                    if rollbacks >= cfg.max_rollbacks && !report.stable {
                        break;
                    }
                }
            }
        }
    };

    Ok(GenerationResult {
        structure: session.structure,
        report,
        flag,
        rollbacks,
        rejections: session.rejections,
        total_draws: session.total_draws,
        #[cfg(feature = "std")]
        wall_seconds: start.elapsed().as_secs_f64(),
        #[cfg(not(feature = "std"))]
        wall_seconds: 0.0,
    })
}

/// Replays a fixed script of events; every draw after the script ends is
/// end-of-structure. Lines equal to the empty string are end markers.
#[derive(Debug, Clone)]
pub struct ReplayGenerator {
    events: VecDeque<GeneratorEvent>,
    /// Temperatures observed per draw, for trace verification.
    pub temperatures: Vec<f64>,
}

impl ReplayGenerator {
    pub fn new(events: Vec<GeneratorEvent>) -> Self {
        ReplayGenerator { events: events.into(), temperatures: Vec::new() }
    }

    /// Builds a script from text lines; an empty line is end-of-structure.
    pub fn from_lines<S: AsRef<str>>(lines: &[S]) -> Self {
        Self::new(
            lines
                .iter()
                .map(|l| {
                    let l = l.as_ref();
                    if l.is_empty() {
                        GeneratorEvent::End
                    } else {
                        GeneratorEvent::Line(l.to_string())
                    }
                })
                .collect(),
        )
    }
}

impl BrickGenerator for ReplayGenerator {
    fn next_line(
        &mut self,
        _context: &GenerationContext<'_>,
        temperature: f64,
    ) -> Result<GeneratorEvent, GeneratorError> {
        self.temperatures.push(temperature);
        Ok(self.events.pop_front().unwrap_or(GeneratorEvent::End))
    }
}

/// A deterministic local generator backed by the greedy layout fill.
///
/// The first plan covers the target grid with the layer-by-layer greedy
/// fill. After a rollback (detected through a shorter partial context), the
/// remaining uncovered cells are re-planned with rebuild priorities and a
/// fresh tie-break seed, so retries explore different layouts instead of
/// repeating the rejected suffix.
pub struct GreedyStructureGenerator {
    target: VoxelGrid,
    seed: u64,
    queue: VecDeque<Brick>,
    planned: bool,
    expected_lines: usize,
    replans: u64,
}

impl GreedyStructureGenerator {
    pub fn new(target: VoxelGrid, seed: u64) -> Self {
        GreedyStructureGenerator {
            target,
            seed,
            queue: VecDeque::new(),
            planned: false,
            expected_lines: 0,
            replans: 0,
        }
    }

    fn plan(&mut self, context: &GenerationContext<'_>, grid: &GridWorld) {
        let partial = text::parse_structure(context.partial, grid)
            .expect("harness context serializes valid structures");
        // Remaining cells = target minus what the partial already covers.
        let mut remaining = self.target.clone();
        for b in &partial.bricks {
            for (x, y, z) in b.voxels() {
                remaining.set(x, y, z, false);
            }
        }
        self.queue.clear();
        if remaining.is_empty() {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(self.replans));
        let planned = if partial.is_empty() {
            legolize::greedy_fill(&remaining, grid, &mut rng)
        } else {
            // Re-plan around the kept prefix with rebuild priorities.
            let mut merged = geometry::occupancy_grid(&partial)
                .expect("harness keeps the partial collision-free");
            for (x, y, z) in remaining.iter_occupied() {
                merged.set(x, y, z, true);
            }
            legolize::refill_around(&partial, &merged, &mut rng)
        };
        match planned {
            Ok(s) => {
                for b in s.bricks.iter().skip(partial.len()) {
                    self.queue.push_back(*b);
                }
            }
            Err(_) => {
                // Leave the queue empty: the session sees end-of-structure.
            }
        }
    }
}

impl BrickGenerator for GreedyStructureGenerator {
    fn next_line(
        &mut self,
        context: &GenerationContext<'_>,
        _temperature: f64,
    ) -> Result<GeneratorEvent, GeneratorError> {
        let grid = GridWorld::new(
            self.target.dims().0,
            self.target.dims().1,
            self.target.dims().2,
        );
        let lines = context.partial_line_count();
        if !self.planned || lines < self.expected_lines {
            if self.planned {
                self.replans += 1;
            }
            self.plan(context, &grid);
            self.planned = true;
        }
        self.expected_lines = lines;
        match self.queue.pop_front() {
            Some(brick) => {
                self.expected_lines = lines + 1;
                Ok(GeneratorEvent::Line(text::serialize_brick(&brick)))
            }
            None => Ok(GeneratorEvent::End),
        }
    }
}
