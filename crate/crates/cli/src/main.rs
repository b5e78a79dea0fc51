use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frozen_snowflake::error::{Error, Result};
use frozen_snowflake::exec::{with_threads, Exec};
use frozen_snowflake::geometry::Ball;
use frozen_snowflake::io::commands::{
    cmd_analyze, cmd_export_svg, cmd_generate, cmd_report, cmd_wos, AnalyzeFixture, SvgSource, WosFixture,
};
use frozen_snowflake::io::svg::SvgOptions;
use frozen_snowflake::io::{Report, RunConfig, WindowSpec};

/// Builds the frozen-snowflake domains generation by generation and
/// measures them.
#[derive(Parser, Debug)]
#[command(name = "fsnow", version)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Every flag overrides the matching key of `--config`.
#[derive(Args, Debug)]
struct RunArgs {
    /// File of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated M schedule, e.g. 2,3,4.
    #[arg(long, global = true)]
    schedule: Option<String>,
    #[arg(long, global = true)]
    generations: Option<String>,
    #[arg(long, global = true)]
    leaf_budget: Option<String>,
    #[arg(long, global = true)]
    chord_budget: Option<String>,
    /// global, tracked, or x,y,r in the coordinates of the initial polygon.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, global = true)]
    epsilon: Option<String>,
    #[arg(long, global = true)]
    max_steps: Option<String>,
    #[arg(long, global = true)]
    sphere_cap: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    walks: Option<String>,
    /// Output directory.
    #[arg(long, short, global = true)]
    output: Option<String>,
    /// text or structured.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    threads: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build the generations and write snapshots, registries and a manifest.
    Generate,
    /// Regularity checks on a generated run, or on a fixture.
    Analyze {
        #[arg(long, value_enum)]
        fixture: Option<AnalyzeFix>,
    },
    /// Walk-on-spheres estimates on a generated run, or on the disk fixture.
    Wos {
        #[arg(long, value_enum)]
        fixture: Option<WosFix>,
    },
    /// Render a snapshot or a figure fixture to SVG.
    ExportSvg {
        #[arg(long, conflicts_with = "figure", required_unless_present = "figure")]
        snapshot: Option<PathBuf>,
        #[arg(long, value_enum)]
        figure: Option<Figure>,
        /// Destination file.
        #[arg(long)]
        svg: PathBuf,
        /// Only draw edges meeting this ball (x,y,r).
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        /// Ball overlay x,y,r; repeatable.
        #[arg(long = "ball", allow_hyphen_values = true)]
        balls: Vec<String>,
        #[arg(long)]
        title: Option<String>,
    },
    /// Collect the reports of the output directory.
    Report,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AnalyzeFix {
    Line,
    Wedge,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WosFix {
    Disk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Figure {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        let flags = [
            ("schedule", &self.schedule),
            ("generations", &self.generations),
            ("leaf_budget", &self.leaf_budget),
            ("chord_budget", &self.chord_budget),
            ("window", &self.window),
            ("epsilon", &self.epsilon),
            ("max_steps", &self.max_steps),
            ("sphere_cap", &self.sphere_cap),
            ("seed", &self.seed),
            ("walks", &self.walks),
            ("output", &self.output),
            ("format", &self.format),
            ("threads", &self.threads),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn ball(s: &str) -> Result<Ball> {
    match s.parse::<WindowSpec>()? {
        WindowSpec::Ball(b) => Ok(b),
        _ => Err(Error::Config(format!("expected x,y,r, got {s:?}"))),
    }
}

/// `Ok(true)` when every check passed.
fn run(cmd: &Cmd, cfg: &RunConfig) -> Result<bool> {
    let exec = Exec::available();
    let print = |rep: &Report| {
        print!("{}", rep.render(cfg.format));
        rep.all_pass()
    };
    match cmd {
        Cmd::Generate => Ok(print(&cmd_generate(cfg, exec)?)),
        Cmd::Analyze { fixture } => {
            let f = fixture.map(|f| match f {
                AnalyzeFix::Line => AnalyzeFixture::Line,
                AnalyzeFix::Wedge => AnalyzeFixture::Wedge,
            });
            Ok(print(&cmd_analyze(cfg, f, exec)?))
        }
        Cmd::Wos { fixture } => {
            let f = fixture.map(|WosFix::Disk| WosFixture::Disk);
            Ok(print(&cmd_wos(cfg, f, exec)?))
        }
        Cmd::ExportSvg {
            snapshot,
            figure,
            svg,
            region,
            balls,
            title,
        } => {
            let opts = SvgOptions {
                region: region.as_deref().map(ball).transpose()?,
                balls: balls.iter().map(|b| ball(b)).collect::<Result<_>>()?,
                normals: Vec::new(),
                title: title.clone(),
            };
            let fig = figure.map(|f| match f {
                Figure::One => SvgSource::Figure1,
                Figure::Two => SvgSource::Figure2,
            });
            let n = cmd_export_svg(snapshot.as_deref(), fig, &opts, svg)?;
            println!("wrote {} ({n} segments)", svg.display());
            Ok(true)
        }
        Cmd::Report => Ok(print(&cmd_report(cfg)?)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let outcome = cli.run.config().and_then(|cfg| match cfg.threads {
        Some(t) => with_threads(t, || run(&cli.cmd, &cfg)),
        None => run(&cli.cmd, &cfg),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fsnow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
