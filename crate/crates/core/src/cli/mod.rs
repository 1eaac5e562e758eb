//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when an input fails (the message names the
//! file), 2 on usage errors.

pub mod csvio;
pub mod report;

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analytics::{
    aggregate_best_k, course_percentage, pct_to_grade, score_response, EctsGrade, EctsScale, ScoringPolicy,
    DEFAULT_TEST_WEIGHT,
};
use crate::assemble::assemble_test;
use crate::bank::{contribution_stats, merge_banks, render_contribution_table, Dedup};
use crate::export::{export_gift, export_html, export_pdf_with_report};
use crate::jqz::{parse_bank_from, serialize_bank};
use crate::model::{validate_question, AssemblyConfig, QuestionBank, TestScore};
use crate::stats::{group_points, one_way_anova, summarize_groups, tukey_hsd, DEFAULT_ALPHA};

pub use csvio::{
    parse_counts_csv, parse_grades_csv, parse_key_csv, parse_percentages_csv, parse_responses_csv,
    render_grades_csv, render_key_csv, CsvError,
};

#[derive(Debug, Parser)]
#[command(name = "quizforge", version, about = "Build, export and grade multiple-choice tests from student question banks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Merge question banks into one .jqz file
    Merge {
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Drop questions whose normalized text repeats an earlier one
        #[arg(long)]
        dedup: bool,
    },
    /// Check that .jqz files parse and every question is well formed
    Validate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Assemble a test from a bank and export it
    Assemble(AssembleArgs),
    /// Score response sheets against an answer key
    Score {
        key: PathBuf,
        responses: PathBuf,
        /// Points deducted per wrong answer
        #[arg(long, default_value_t = 0.0)]
        penalty: f64,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit student,test_id,correct,wrong,blank,percentage
        #[arg(long)]
        csv: bool,
    },
    /// Average each student's best K tests and optionally blend with an exam
    Aggregate {
        scores: PathBuf,
        #[arg(long)]
        best: usize,
        #[arg(long, default_value_t = DEFAULT_TEST_WEIGHT)]
        weight: f64,
        /// CSV with student,percentage exam results
        #[arg(long)]
        exam: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Grade statistics
    #[command(subcommand)]
    Stats(StatsCommand),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("outputs").required(true).multiple(true))]
struct AssembleArgs {
    bank: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    subset: Option<usize>,
    #[arg(long)]
    shuffle_questions: bool,
    #[arg(long)]
    shuffle_answers: bool,
    /// Defaults to the bank title
    #[arg(long)]
    title: Option<String>,
    #[arg(long, default_value = "")]
    subtitle: String,
    #[arg(long, default_value = "")]
    instructions: String,
    /// Append the answer-key table to the PDF
    #[arg(long)]
    answer_table: bool,
    #[arg(long, group = "outputs")]
    pdf: Option<PathBuf>,
    #[arg(long, group = "outputs")]
    html: Option<PathBuf>,
    /// Show the answer key in the HTML output
    #[arg(long, requires = "html")]
    reveal_key: bool,
    #[arg(long, group = "outputs")]
    gift: Option<PathBuf>,
    /// Write the answer key as position,letter CSV
    #[arg(long, group = "outputs")]
    key: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Per-group mark distribution, mean and standard deviation
    Summary(GradesArgs),
    /// One-way ANOVA over the groups
    Anova(GradesArgs),
    /// Tukey HSD pairwise comparisons
    Tukey(GradesArgs),
    /// Questions posted per student
    Contributions {
        counts: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct GradesArgs {
    grades: PathBuf,
    /// Family-wise significance level
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn at<E: Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(at(path))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(at(path))
}

fn read_bank(path: &Path) -> Result<QuestionBank, Failure> {
    let bytes = fs::read(path).map_err(at(path))?;
    let source = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_bank_from(&bytes, &source).map_err(at(path))
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match run(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

pub fn run_main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    dispatch(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Merge { out: target, inputs, dedup } => merge(&target, &inputs, dedup, out),
        Command::Validate { inputs } => validate(&inputs, out, err),
        Command::Assemble(args) => assemble(args, out, err),
        Command::Score {
            key,
            responses,
            penalty,
            json,
            csv,
        } => score(&key, &responses, penalty, json, csv, out),
        Command::Aggregate {
            scores,
            best,
            weight,
            exam,
            json,
        } => aggregate(&scores, best, weight, exam.as_deref(), json, out),
        Command::Stats(cmd) => stats(cmd, out),
    }
}

fn merge(target: &Path, inputs: &[PathBuf], dedup: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let banks = inputs.iter().map(|p| read_bank(p)).collect::<Result<Vec<_>, _>>()?;
    let mode = if dedup { Dedup::NormalizedText } else { Dedup::Off };
    let mut merged = merge_banks(&banks, mode);
    if let Some(stem) = target.file_stem() {
        merged.title = stem.to_string_lossy().into_owned();
    }
    write_file(target, &serialize_bank(&merged))?;
    let total: usize = banks.iter().map(QuestionBank::len).sum();
    writeln!(
        out,
        "{}: {} questions from {} files ({} duplicates dropped)",
        target.display(),
        merged.len(),
        inputs.len(),
        total - merged.len()
    )?;
    Ok(())
}

fn validate(inputs: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut failed = 0;
    for path in inputs {
        match read_bank(path) {
            Ok(bank) => {
                let issues: Vec<String> = bank
                    .questions
                    .iter()
                    .flat_map(|q| validate_question(q).into_iter().map(move |i| format!("{}: {i}", q.id)))
                    .collect();
                if issues.is_empty() {
                    writeln!(out, "{}: ok, {} questions", path.display(), bank.len())?;
                } else {
                    failed += 1;
                    for issue in issues {
                        writeln!(err, "{}: {issue}", path.display())?;
                    }
                }
            }
            Err(Failure::Input(msg)) => {
                failed += 1;
                writeln!(err, "{msg}")?;
            }
            Err(other) => return Err(other),
        }
    }
    if failed > 0 {
        return Err(Failure::Input(format!("{failed} of {} files failed validation", inputs.len())));
    }
    Ok(())
}

fn assemble(args: AssembleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let bank = read_bank(&args.bank)?;
    let cfg = AssemblyConfig {
        seed: args.seed,
        subset_size: args.subset,
        shuffle_questions: args.shuffle_questions,
        shuffle_answers: args.shuffle_answers,
        title: args.title.unwrap_or_else(|| bank.title.clone()),
        subtitle: args.subtitle,
        instructions: args.instructions,
        answer_table: args.answer_table,
    };
    let test = assemble_test(&bank, &cfg).map_err(at(&args.bank))?;
    if let Some(path) = &args.pdf {
        let (bytes, report) = export_pdf_with_report(&test);
        write_file(path, &bytes)?;
        writeln!(out, "{}: {} pages", path.display(), report.pages)?;
        if report.replaced_chars > 0 {
            writeln!(
                err,
                "warning: {}: {} characters outside Latin-1 replaced with '?'",
                path.display(),
                report.replaced_chars
            )?;
        }
    }
    if let Some(path) = &args.html {
        write_file(path, &export_html(&test, args.reveal_key))?;
        writeln!(out, "{}: written", path.display())?;
    }
    if let Some(path) = &args.gift {
        write_file(path, export_gift(&test.to_bank()).as_bytes())?;
        writeln!(out, "{}: written", path.display())?;
    }
    if let Some(path) = &args.key {
        write_file(path, render_key_csv(&test.key).as_bytes())?;
        writeln!(out, "{}: written", path.display())?;
    }
    writeln!(out, "assembled {} of {} questions (seed {})", test.items.len(), bank.len(), cfg.seed)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScoreRow {
    student: String,
    test_id: String,
    #[serde(flatten)]
    score: TestScore,
}

fn score(
    key_path: &Path,
    responses_path: &Path,
    penalty: f64,
    json: bool,
    csv: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let policy = ScoringPolicy::with_penalty(penalty).map_err(|e| Failure::Usage(format!("--penalty: {e}")))?;
    let key = parse_key_csv(&read_text(key_path)?).map_err(at(key_path))?;
    let sheets = parse_responses_csv(&read_text(responses_path)?).map_err(at(responses_path))?;
    let mut rows = Vec::with_capacity(sheets.len());
    for sheet in sheets {
        let score = score_response(&sheet, &key, &policy)
            .map_err(|e| Failure::Input(format!("{}: student {}: {e}", responses_path.display(), sheet.student)))?;
        rows.push(ScoreRow {
            student: sheet.student,
            test_id: sheet.test_id,
            score,
        });
    }
    if json {
        return json_line(out, &rows);
    }
    if csv {
        let mut w = ::csv::Writer::from_writer(Vec::new());
        w.write_record(["student", "test_id", "correct", "wrong", "blank", "percentage"])
            .expect("in-memory write");
        for r in &rows {
            w.write_record([
                r.student.clone(),
                r.test_id.clone(),
                r.score.correct.to_string(),
                r.score.wrong.to_string(),
                r.score.blank.to_string(),
                format!("{:.2}", r.score.percentage),
            ])
            .expect("in-memory write");
        }
        out.write_all(&w.into_inner().expect("in-memory flush"))?;
        return Ok(());
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.student.clone(),
                r.test_id.clone(),
                r.score.correct.to_string(),
                r.score.wrong.to_string(),
                r.score.blank.to_string(),
                format!("{:.2}", r.score.percentage),
            ]
        })
        .collect();
    write!(
        out,
        "{}",
        report::render_table(&["Student", "Test", "Correct", "Wrong", "Blank", "Percentage"], &table)
    )?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct AggregateRow {
    student: String,
    tests: usize,
    best_k: f64,
    exam: Option<f64>,
    course: Option<f64>,
    grade: Option<EctsGrade>,
}

fn aggregate(
    scores_path: &Path,
    best: usize,
    weight: f64,
    exam_path: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if best == 0 {
        return Err(Failure::Usage("--best must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&weight) {
        return Err(Failure::Usage(format!("--weight must be in [0, 1], got {weight}")));
    }
    let scores = parse_percentages_csv(&read_text(scores_path)?).map_err(at(scores_path))?;
    if scores.is_empty() {
        return Err(Failure::Input(format!("{}: no scores", scores_path.display())));
    }
    let exams = match exam_path {
        Some(p) => Some(parse_percentages_csv(&read_text(p)?).map_err(at(p))?),
        None => None,
    };

    let mut students: Vec<(String, Vec<f64>)> = Vec::new();
    for (student, pct) in scores {
        match students.iter_mut().find(|(s, _)| *s == student) {
            Some((_, v)) => v.push(pct),
            None => students.push((student, vec![pct])),
        }
    }
    let scale = EctsScale::default();
    let mut rows = Vec::with_capacity(students.len());
    for (student, pcts) in students {
        let best_k = aggregate_best_k(&pcts, best).map_err(at(scores_path))?;
        let exam = exams
            .as_ref()
            .and_then(|e| e.iter().find(|(s, _)| *s == student).map(|(_, p)| *p));
        let (course, grade) = match exam {
            Some(exam) => {
                let course = course_percentage(best_k, exam, weight).map_err(at(scores_path))?;
                (Some(course), Some(pct_to_grade(course, &scale).map_err(at(scores_path))?))
            }
            None => (None, None),
        };
        rows.push(AggregateRow {
            student,
            tests: pcts.len(),
            best_k,
            exam,
            course,
            grade,
        });
    }
    if json {
        return json_line(out, &rows);
    }
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    let best_header = format!("Best {best}");
    let mut headers = vec!["Student", "Tests", best_header.as_str()];
    if exams.is_some() {
        headers.extend(["Exam", "Course", "Grade", "Letter", "Points"]);
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut line = vec![r.student.clone(), r.tests.to_string(), format!("{:.2}", r.best_k)];
            if exams.is_some() {
                line.push(opt(r.exam));
                line.push(opt(r.course));
                match &r.grade {
                    Some(g) => line.extend([g.spanish.to_string(), g.letter.to_string(), g.points.to_string()]),
                    None => line.extend(["-".to_string(), "-".to_string(), "-".to_string()]),
                }
            }
            line
        })
        .collect();
    write!(out, "{}", report::render_table(&headers, &table))?;
    Ok(())
}

fn stats(cmd: StatsCommand, out: &mut dyn Write) -> Result<(), Failure> {
    let (args, kind) = match cmd {
        StatsCommand::Contributions { counts, json } => {
            let values = parse_counts_csv(&read_text(&counts)?).map_err(at(&counts))?;
            let s = contribution_stats(&values).map_err(at(&counts))?;
            if json {
                return json_line(out, &s);
            }
            write!(out, "{}", render_contribution_table(&s))?;
            return Ok(());
        }
        StatsCommand::Summary(a) => (a, "summary"),
        StatsCommand::Anova(a) => (a, "anova"),
        StatsCommand::Tukey(a) => (a, "tukey"),
    };
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Failure::Usage(format!("--alpha must be in (0, 1), got {}", args.alpha)));
    }
    let path = &args.grades;
    let records = parse_grades_csv(&read_text(path)?).map_err(at(path))?;
    if records.is_empty() {
        return Err(Failure::Input(format!("{}: no grade records", path.display())));
    }
    match kind {
        "summary" => {
            let rows = report::summary_rows(&records, summarize_groups(&records));
            if args.json {
                return json_line(out, &rows);
            }
            write!(out, "{}", report::render_summary(&rows))?;
        }
        "anova" => {
            let groups: Vec<Vec<f64>> = group_points(&records).into_iter().map(|(_, p)| p).collect();
            let a = one_way_anova(&groups).map_err(at(path))?;
            if args.json {
                return json_line(out, &a);
            }
            write!(out, "{}", report::render_anova(&a))?;
        }
        _ => {
            let contrasts = tukey_hsd(&group_points(&records), args.alpha).map_err(at(path))?;
            if args.json {
                return json_line(out, &contrasts);
            }
            write!(out, "{}", report::render_tukey(&contrasts, args.alpha))?;
        }
    }
    Ok(())
}
