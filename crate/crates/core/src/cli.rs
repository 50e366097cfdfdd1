//! The `rfst` command line.
//!
//! Exit codes: 0 on success, 1 on invalid input or usage, 2 when a
//! numerical check fails (e.g. `equiv` finds no signed-permutation match).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{coding_gain, dc_leakage_energy, frequency_response, DEFAULT_FREQ_POINTS, DEFAULT_RHO};
use crate::error::Result;
use crate::imaging::{self, coeff, pgm, BlockTransform};
use crate::rdst::{rdst, signed_perm_equivalent, DEFAULT_EQUIV_TOL};
use crate::regularity::{build_dst_cascade, build_general_cascade, dc_response, extra_op_count, rfst, PostprocessStyle};
use crate::textfmt::{emit_cascade, emit_matrix, format_real};
use crate::transforms::TransformKind;
use crate::build_transform;

/// Residual above which `check` reports a numerical failure.
const CHECK_ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "rfst", version, about = "Regularity-constrained fast sine transform toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum What {
    Matrix,
    Cascade,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ImageAction {
    Forward,
    Inverse,
    Mosaic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a transform matrix or its regularity cascade.
    Gen {
        #[arg(long = "type")]
        kind: TransformKind,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value = "matrix")]
        what: What,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print orthonormality residual, DC response and DC leakage.
    Check {
        #[arg(long = "type")]
        kind: TransformKind,
        #[arg(long)]
        size: usize,
    },
    /// Coding gain under the AR(1) model as a CSV row.
    CodingGain {
        #[arg(long = "type")]
        kind: TransformKind,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: f64,
    },
    /// Coding gains for DST, R-DST, R-FST and Hadamard at M = 2..32.
    Table1 {
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: f64,
    },
    /// Extra multiplications/additions of both postprocessing styles.
    Opcount {
        #[arg(long)]
        size: usize,
    },
    /// Check R-FST against the null-space R-DST up to signed row permutation.
    Equiv {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_EQUIV_TOL)]
        tol: f64,
    },
    /// Per-row magnitude responses as CSV files.
    Freq {
        #[arg(long = "type")]
        kind: TransformKind,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_FREQ_POINTS)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Block-transform a PGM image, invert a coefficient file, or render a subband mosaic.
    Image {
        #[arg(value_enum)]
        action: ImageAction,
        #[arg(long)]
        transform: TransformKind,
        #[arg(long)]
        block: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time cascade vs. dense half-size postprocessing on a seeded image.
    Bench {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 512)]
        image_size: usize,
        #[arg(long, default_value_t = 11)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Outcome of a subcommand that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

/// Runs the CLI with `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(Status::Ok) => 0,
        Ok(Status::CheckFailed) => 2,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn block_operator(kind: TransformKind, m: usize) -> Result<Box<dyn BlockTransform>> {
    Ok(match kind {
        TransformKind::Rfst => Box::new(rfst(m)?),
        other => Box::new(build_transform(other, m)?),
    })
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<Status> {
    match command {
        Command::Gen { kind, size, what, out } => {
            let text = match what {
                What::Matrix => emit_matrix(build_transform(kind, size)?.matrix()),
                What::Cascade => {
                    let cascade = match kind {
                        TransformKind::Rfst | TransformKind::Dst2 => build_dst_cascade(size)?,
                        other => build_general_cascade(&build_transform(other, size)?)?,
                    };
                    emit_cascade(&cascade)
                }
            };
            emit(out.as_deref(), &text, stdout)?;
            Ok(Status::Ok)
        }
        Command::Check { kind, size } => {
            let t = build_transform(kind, size)?;
            let residual = t.orthonormality_residual();
            let a = dc_response(&t);
            let dc: Vec<String> = a.values.iter().map(|&v| format_real(v)).collect();
            writeln!(stdout, "type={kind} M={size}")?;
            writeln!(stdout, "orthonormality_residual={}", format_real(residual))?;
            writeln!(stdout, "row_norm_residual={}", format_real(t.row_norm_residual()))?;
            writeln!(stdout, "dc_response={}", dc.join(","))?;
            writeln!(stdout, "dc_leakage_energy={}", format_real(dc_leakage_energy(&t)))?;
            Ok(if residual <= CHECK_ORTHONORMAL_TOL {
                Status::Ok
            } else {
                Status::CheckFailed
            })
        }
        Command::CodingGain { kind, size, rho } => {
            let report = coding_gain(&build_transform(kind, size)?, rho)?;
            writeln!(stdout, "{}", report.csv_row())?;
            Ok(Status::Ok)
        }
        Command::Table1 { rho } => {
            writeln!(stdout, "kind,M,rho,gain_db")?;
            for kind in [
                TransformKind::Dst2,
                TransformKind::Rdst,
                TransformKind::Rfst,
                TransformKind::Hadamard,
            ] {
                for m in [2, 4, 8, 16, 32] {
                    let report = coding_gain(&build_transform(kind, m)?, rho)?;
                    writeln!(stdout, "{}", report.csv_row())?;
                }
            }
            Ok(Status::Ok)
        }
        Command::Opcount { size } => {
            writeln!(stdout, "style,M,mul,add")?;
            for style in [PostprocessStyle::DenseHalf, PostprocessStyle::Cascade] {
                let r = extra_op_count(size, style)?;
                writeln!(stdout, "{},{},{},{}", style.name(), r.size, r.mul, r.add)?;
            }
            Ok(Status::Ok)
        }
        Command::Equiv { size, tol } => {
            let oracle = rdst(size)?;
            let fast = rfst(size)?.as_matrix();
            match signed_perm_equivalent(oracle.matrix(), fast.matrix(), tol)? {
                Some(eq) => {
                    writeln!(
                        stdout,
                        "EQUIVALENT M={size} tol={tol:e} max_residual={:e}",
                        eq.max_residual
                    )?;
                    writeln!(stdout, "rdst_row,rfst_row,sign")?;
                    for (m, (&p, &s)) in eq.witness.perm().iter().zip(eq.witness.signs()).enumerate() {
                        writeln!(stdout, "{m},{p},{s}")?;
                    }
                    Ok(Status::Ok)
                }
                None => {
                    writeln!(stdout, "FAIL M={size} tol={tol:e}: no signed row permutation matches")?;
                    Ok(Status::CheckFailed)
                }
            }
        }
        Command::Freq { kind, size, points, out } => {
            let t = build_transform(kind, size)?;
            fs::create_dir_all(&out)?;
            for m in 0..size {
                let resp = frequency_response(&t, m, points)?;
                let mut text = String::from("omega,mag\n");
                for (w, h) in resp.omega.iter().zip(&resp.magnitude) {
                    text.push_str(&format!("{},{}\n", format_real(*w), format_real(*h)));
                }
                fs::write(out.join(format!("{kind}_M{size}_row{m}.csv")), text)?;
            }
            writeln!(stdout, "wrote {size} response files to {}", out.display())?;
            Ok(Status::Ok)
        }
        Command::Image {
            action,
            transform,
            block,
            input,
            out,
        } => {
            let op = block_operator(transform, block)?;
            match action {
                ImageAction::Forward => {
                    let img = pgm::read(&input)?;
                    coeff::write(&out, &imaging::forward_2d(&img, op.as_ref())?)?;
                }
                ImageAction::Inverse => {
                    let c = coeff::read(&input)?;
                    pgm::write(&out, &imaging::inverse_2d(&c, op.as_ref())?.to_gray())?;
                }
                ImageAction::Mosaic => {
                    let img = pgm::read(&input)?;
                    let c = imaging::forward_2d(&img, op.as_ref())?;
                    pgm::write(&out, &imaging::subband_mosaic(&c))?;
                }
            }
            Ok(Status::Ok)
        }
        Command::Bench {
            size,
            image_size,
            repeats,
            seed,
        } => {
            let report = imaging::bench_postprocessing(size, image_size, repeats, seed)?;
            writeln!(stdout, "{}", imaging::BenchReport::CSV_HEADER)?;
            writeln!(stdout, "{}", report.csv_row())?;
            // Both variants realize the same operator.
            Ok(if report.max_abs_diff <= 1e-10 {
                Status::Ok
            } else {
                Status::CheckFailed
            })
        }
    }
}
