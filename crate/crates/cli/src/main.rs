//! `autocine`: plan a camera path from object tracks and render it.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors. Data
//! errors are reported as a single JSON line on standard error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use autocine::config::{parse_config, DirectorConfig};
use autocine::path::{parse_camera_path, CameraPath};
use autocine::renderer::{frame_file_name, render_sequence, write_ppm, DirFrameSink, DirFrameSource};
use autocine::synth::{parse_scenario, synth_panorama, synth_scene};
use autocine::tracks::parse_scene;
use autocine::{direct, DirectorOutput};
use clap::{Parser, Subcommand};

const PATH_FILE: &str = "camera_path.json";

#[derive(Parser)]
#[command(name = "autocine", version, about = "Automatic cinematography for 360-degree video")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a camera path from a track file.
    Direct {
        #[arg(long)]
        tracks: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render perspective frames along a camera path.
    Render {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_size, default_value = "960x540")]
        size: (usize, usize),
    },
    /// Plan, then render; writes the path file and frames into --out.
    Pipeline {
        #[arg(long)]
        tracks: PathBuf,
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_size, default_value = "960x540")]
        size: (usize, usize),
    },
    /// Generate a synthetic track file and, optionally, matching panoramas.
    Synth {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        frames: Option<PathBuf>,
    },
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: usize = w.parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height `{h}`"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

struct DataError {
    kind: &'static str,
    path: Option<PathBuf>,
    message: String,
}

impl DataError {
    fn new(kind: &'static str, path: Option<&Path>, message: impl ToString) -> Self {
        Self {
            kind,
            path: path.map(Path::to_path_buf),
            message: message.to_string(),
        }
    }

    fn to_line(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("error".into(), self.kind.into());
        if let Some(p) = &self.path {
            obj.insert("path".into(), p.display().to_string().into());
        }
        obj.insert("message".into(), self.message.clone().into());
        serde_json::Value::Object(obj).to_string()
    }
}

type Result<T> = std::result::Result<T, DataError>;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| DataError::new("io", Some(path), e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| DataError::new("io", Some(parent), e))?;
    }
    fs::write(path, bytes).map_err(|e| DataError::new("io", Some(path), e))
}

fn load_config(path: Option<&Path>) -> Result<DirectorConfig> {
    match path {
        None => Ok(DirectorConfig::default()),
        Some(p) => parse_config(&read(p)?).map_err(|e| DataError::new("config", Some(p), e)),
    }
}

fn plan(tracks: &Path, config: Option<&Path>) -> Result<(DirectorOutput, CameraPath)> {
    let scene = parse_scene(&read(tracks)?).map_err(|e| DataError::new("tracks", Some(tracks), e))?;
    if let Some(w) = scene.aspect_warning() {
        eprintln!("warning: {w}");
    }
    let cfg = load_config(config)?;
    let out = direct(&scene, &cfg).map_err(|e| DataError::new("director", None, e))?;
    let path = CameraPath::from_output(&out);
    Ok((out, path))
}

fn print_shots(out: &DirectorOutput) {
    println!(
        "{:>4}  {:<12} {:>7} {:>7} {:>9}  targets",
        "shot", "type", "start", "end", "score"
    );
    for (i, s) in out.shots.iter().enumerate() {
        println!(
            "{:>4}  {:<12} {:>7} {:>7} {:>9.4}  {}{}",
            i,
            s.shot_type.as_str(),
            s.range.start,
            s.range.end,
            s.score,
            s.target_ids.join(","),
            if s.relaxed { "  (relaxed)" } else { "" }
        );
    }
}

fn render(frames: &Path, path: &CameraPath, out: &Path, (w, h): (usize, usize)) -> Result<usize> {
    let viewports = path
        .viewports(w as f64 / h as f64)
        .map_err(|e| DataError::new("path", None, e))?;
    let mut source = DirFrameSource::open(frames).map_err(|e| DataError::new("render", Some(frames), e))?;
    let mut sink = DirFrameSink::create(out).map_err(|e| DataError::new("io", Some(out), e))?;
    render_sequence(&mut source, &viewports, w, h, &mut sink).map_err(|e| DataError::new("render", None, e))
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Direct { tracks, config, out } => {
            let (output, path) = plan(&tracks, config.as_deref())?;
            write(&out, path.to_json().as_bytes())?;
            print_shots(&output);
        }
        Command::Render {
            frames,
            path,
            out,
            size,
        } => {
            let camera = parse_camera_path(&read(&path)?).map_err(|e| DataError::new("path", Some(&path), e))?;
            let n = render(&frames, &camera, &out, size)?;
            println!("rendered {n} frames");
        }
        Command::Pipeline {
            tracks,
            frames,
            config,
            out,
            size,
        } => {
            let (output, path) = plan(&tracks, config.as_deref())?;
            write(&out.join(PATH_FILE), path.to_json().as_bytes())?;
            print_shots(&output);
            let n = render(&frames, &path, &out, size)?;
            println!("rendered {n} frames");
        }
        Command::Synth { scenario, out, frames } => {
            let spec = parse_scenario(&read(&scenario)?).map_err(|e| DataError::new("scenario", Some(&scenario), e))?;
            let scene = synth_scene(&spec).map_err(|e| DataError::new("scenario", Some(&scenario), e))?;
            write(&out, scene.to_json().as_bytes())?;
            if let Some(dir) = frames {
                for f in 0..scene.num_frames() {
                    let img = synth_panorama(&spec, f).map_err(|e| DataError::new("scenario", Some(&scenario), e))?;
                    write(&dir.join(frame_file_name(f)), &write_ppm(&img))?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(2)
        }
    }
}
