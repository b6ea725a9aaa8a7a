// Copyright 2026 The cloudsort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end. Exit codes: 0 success (including partial
//! success), 1 when only per-item failures occurred, 2 on fatal errors.

use std::fmt::{Debug, Display};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cloudsort_core::classifier::{per_class_accuracy, train, TrainConfig};
use cloudsort_core::descriptor::{DescriptorKind, RegionGrowingParams};
use cloudsort_core::evaluation::{confusion, split_alternating_contiguous, split_category_level};
use cloudsort_core::kinematics::{DhParameters, JointConfig};
use cloudsort_core::pcloud::{centroid, DEFAULT_NORMAL_K};
use cloudsort_core::segmentation::{segment_scene_detailed, SegmentationConfig};
use cloudsort_core::Vec3;

use crate::config::{load_bin_map, load_dh_table, parse_joints, parse_segmentation_config, parse_vec3};
use crate::dataset::scan_dataset;
use crate::descriptor_file::{append_descriptors, format_line, load_descriptors, to_training_set};
use crate::model_file::{load_model, save_model};
use crate::numfmt::format_sig;
use crate::pcd::{load_pcd, save_pcd};
use crate::pipeline::{describe_object, sort_scene, SortOptions};
use crate::report::{confusion_csv, metrics_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ITEM_FAILURES: i32 = 1;
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cloudsort",
    version,
    about = "Tabletop object recognition and sorting on colored point clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a scene into object clouds written as `<out>/object_<k>.pcd`.
    Segment {
        scene: PathBuf,
        #[command(flatten)]
        seg: SegArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute descriptors for object clouds, one line per file.
    Describe {
        #[arg(required = true)]
        clouds: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = KindArg::Colorcvfh)]
        descriptor: KindArg,
        #[arg(long)]
        label: String,
        #[arg(long, default_value_t = DEFAULT_NORMAL_K)]
        k_normals: usize,
        /// Descriptor file to append to; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a one-vs-rest linear SVM from a descriptor file.
    Train {
        descriptors: PathBuf,
        #[arg(long, default_value_t = TrainConfig::default().lambda)]
        lambda: f64,
        #[arg(long, default_value_t = TrainConfig::default().epochs)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a model on a descriptor file: confusion and metrics CSVs.
    Eval {
        model: PathBuf,
        descriptors: PathBuf,
        /// Directory for confusion.csv and metrics.csv; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segment, recognize and plan grasps for every object in a scene.
    SortSim {
        scene: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Six `a d alpha` rows; the UR5 table when absent.
        #[arg(long)]
        dh_table: Option<PathBuf>,
        /// `label -> bin_name` lines.
        #[arg(long)]
        bins: PathBuf,
        #[arg(long, value_parser = joints_arg, allow_hyphen_values = true, default_value = "0,0,0,0,0,0")]
        current_joints: JointConfig,
        #[command(flatten)]
        seg: SegArgs,
        #[arg(long, default_value_t = DEFAULT_NORMAL_K)]
        k_normals: usize,
        /// Tool distance above the object centroid, meters.
        #[arg(long, default_value_t = SortOptions::default().standoff)]
        standoff: f64,
        /// Directory for the key=value report `sort_report.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a dataset tree into train and test lists.
    Split {
        root: PathBuf,
        #[arg(long, value_enum, default_value_t = Protocol::Category)]
        protocol: Protocol,
        /// Per category frames (category) or per instance sub-sequences (alternating).
        #[arg(long)]
        train: usize,
        #[arg(long)]
        test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for train.txt and test.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Cvfh,
    Hsv,
    Colorcvfh,
}

impl From<KindArg> for DescriptorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Cvfh => DescriptorKind::Cvfh,
            KindArg::Hsv => DescriptorKind::Hsv,
            KindArg::Colorcvfh => DescriptorKind::ColorCvfh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    Category,
    Alternating,
}

/// Segmentation flags; unset flags fall back to `--config`, then defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct SegArgs {
    /// key=value segmentation settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = vec3_arg, allow_hyphen_values = true)]
    pub crop_min: Option<Vec3>,
    #[arg(long, value_parser = vec3_arg, allow_hyphen_values = true)]
    pub crop_max: Option<Vec3>,
    #[arg(long)]
    pub ransac_threshold: Option<f64>,
    #[arg(long)]
    pub ransac_iters: Option<usize>,
    #[arg(long)]
    pub cluster_dist: Option<f64>,
    #[arg(long)]
    pub cluster_min: Option<usize>,
    #[arg(long)]
    pub cluster_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SegArgs {
    pub fn resolve(&self) -> Result<SegmentationConfig, String> {
        let mut c = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| e.to_string())?;
                parse_segmentation_config(&text).map_err(|e| e.to_string())?
            }
            None => SegmentationConfig::default(),
        };
        c.crop_min = self.crop_min.unwrap_or(c.crop_min);
        c.crop_max = self.crop_max.unwrap_or(c.crop_max);
        c.ransac_threshold = self.ransac_threshold.unwrap_or(c.ransac_threshold);
        c.ransac_iterations = self.ransac_iters.unwrap_or(c.ransac_iterations);
        c.cluster_distance = self.cluster_dist.unwrap_or(c.cluster_distance);
        c.cluster_min_size = self.cluster_min.unwrap_or(c.cluster_min_size);
        c.cluster_max_size = self.cluster_max.unwrap_or(c.cluster_max_size);
        c.rng_seed = self.seed.unwrap_or(c.rng_seed);
        Ok(c)
    }
}

fn vec3_arg(s: &str) -> Result<Vec3, String> {
    parse_vec3(s).map_err(|e| e.to_string())
}

fn joints_arg(s: &str) -> Result<JointConfig, String> {
    parse_joints(s).map_err(|e| e.to_string())
}

/// Leading identifier of a Debug rendering, e.g. `EmptyAfterCrop`.
pub fn variant_name(e: &impl Debug) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .next()
        .unwrap_or_default()
        .to_string()
}

/// Fatal error report: `error: <stage>: <Variant>: <message>`.
struct Fatal(String);

impl Fatal {
    fn new(stage: &str, e: impl Debug + Display) -> Fatal {
        Fatal(format!("{stage}: {}: {e}", variant_name(&e)))
    }

    fn io(stage: &str, path: &Path, e: impl Display) -> Fatal {
        Fatal(format!("{stage}: Io: {}: {e}", path.display()))
    }
}

type Outcome = Result<i32, Fatal>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Segment { scene, seg, out: dir } => cmd_segment(&scene, &seg, &dir, out),
        Command::Describe {
            clouds,
            descriptor,
            label,
            k_normals,
            out: dest,
        } => cmd_describe(&clouds, descriptor.into(), &label, k_normals, dest.as_deref(), out, err),
        Command::Train {
            descriptors,
            lambda,
            epochs,
            seed,
            out: dest,
        } => cmd_train(&descriptors, TrainConfig { lambda, epochs, seed }, &dest, out),
        Command::Eval {
            model,
            descriptors,
            out: dir,
        } => cmd_eval(&model, &descriptors, dir.as_deref(), out),
        Command::SortSim {
            scene,
            model,
            dh_table,
            bins,
            current_joints,
            seg,
            k_normals,
            standoff,
            out: dir,
        } => {
            let options = seg
                .resolve()
                .map_err(|e| Fatal(format!("config: InvalidConfig: {e}")))
                .map(|segmentation| SortOptions {
                    segmentation,
                    k_normals,
                    standoff,
                    ..SortOptions::default()
                });
            options.and_then(|o| {
                cmd_sort_sim(
                    &scene,
                    &model,
                    dh_table.as_deref(),
                    &bins,
                    &current_joints,
                    &o,
                    dir.as_deref(),
                    out,
                )
            })
        }
        Command::Split {
            root,
            protocol,
            train,
            test,
            seed,
            out: dir,
        } => cmd_split(&root, protocol, train, test, seed, &dir, out),
    };
    match result {
        Ok(code) => code,
        Err(Fatal(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FATAL
        }
    }
}

fn cmd_segment(scene: &Path, seg: &SegArgs, dir: &Path, out: &mut dyn Write) -> Outcome {
    let config = seg
        .resolve()
        .map_err(|e| Fatal(format!("config: InvalidConfig: {e}")))?;
    let loaded = load_pcd(scene).map_err(|e| Fatal::new("load", e))?;
    let s = segment_scene_detailed(&loaded.cloud, &config).map_err(|e| Fatal::new("segment", e))?;
    fs::create_dir_all(dir).map_err(|e| Fatal::io("write", dir, e))?;
    let _ = writeln!(
        out,
        "{} points, {} after crop, plane {} ({} inliers), {} object(s)",
        loaded.cloud.len(),
        s.cropped.len(),
        if s.plane_removed { "removed" } else { "kept" },
        s.plane.inlier_indices.len(),
        s.objects.len()
    );
    for (k, obj) in s.objects.iter().enumerate() {
        let path = dir.join(format!("object_{k}.pcd"));
        save_pcd(obj, &path).map_err(|e| Fatal::new("write", e))?;
        let c = centroid(obj).unwrap_or(Vec3::ZERO);
        let _ = writeln!(
            out,
            "{}: {} points, centroid {} {} {}",
            path.display(),
            obj.len(),
            format_sig(c.x, 6),
            format_sig(c.y, 6),
            format_sig(c.z, 6)
        );
    }
    Ok(EXIT_OK)
}

fn cmd_describe(
    clouds: &[PathBuf],
    kind: DescriptorKind,
    label: &str,
    k_normals: usize,
    dest: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    if !crate::descriptor_file::valid_label(label) {
        return Err(Fatal(format!(
            "describe: InvalidLabel: {label:?} must be non-empty without whitespace"
        )));
    }
    let region = RegionGrowingParams::default();
    let mut lines = Vec::new();
    let mut failures = 0;
    for path in clouds {
        let result = load_pcd(path)
            .map_err(|e| format!("load: {}: {e}", variant_name(&e)))
            .and_then(|l| {
                describe_object(&l.cloud, kind, k_normals, &region).map_err(|e| {
                    let inner = match &e {
                        crate::pipeline::DescribeError::Normals(x) => variant_name(x),
                        crate::pipeline::DescribeError::Descriptor(x) => variant_name(x),
                    };
                    format!("describe: {inner}: {e}")
                })
            })
            .and_then(|d| format_line(label, &d).map_err(|e| e.to_string()));
        match result {
            Ok(line) => lines.push(line),
            Err(msg) => {
                failures += 1;
                let _ = writeln!(err, "error: {}: {msg}", path.display());
            }
        }
    }
    match dest {
        Some(p) => append_descriptors(p, &lines).map_err(|e| Fatal::io("write", p, e))?,
        None => {
            for l in &lines {
                let _ = writeln!(out, "{l}");
            }
        }
    }
    Ok(if failures > 0 { EXIT_ITEM_FAILURES } else { EXIT_OK })
}

fn cmd_train(descriptors: &Path, config: TrainConfig, dest: &Path, out: &mut dyn Write) -> Outcome {
    let items = load_descriptors(descriptors).map_err(|e| Fatal::new("load", e))?;
    let data = to_training_set(&items).map_err(|e| match e {
        crate::descriptor_file::DescriptorFileError::Training(t) => Fatal::new("train", t),
        other => Fatal::new("train", other),
    })?;
    let model = train(&data, &config).map_err(|e| Fatal::new("train", e))?;
    save_model(&model, dest).map_err(|e| Fatal::new("write", e))?;
    let per_class = per_class_accuracy(&model, &data).map_err(|e| Fatal::new("train", e))?;
    let correct: f64 = per_class
        .iter()
        .zip(&model.class_index)
        .map(|((_, acc), class)| {
            let n = data.labels.iter().filter(|l| *l == class).count() as f64;
            acc.unwrap_or(0.0) * n
        })
        .sum();
    let _ = writeln!(
        out,
        "trained {} classes on {} samples of dimension {}",
        model.class_index.len(),
        data.len(),
        data.dim()
    );
    for (class, acc) in &per_class {
        let cell = acc.map_or("n/a".to_string(), |a| format!("{:.2}%", 100.0 * a));
        let _ = writeln!(out, "  {class}: {cell}");
    }
    let _ = writeln!(out, "training accuracy {:.2}%", 100.0 * correct / data.len() as f64);
    Ok(EXIT_OK)
}

fn cmd_eval(model: &Path, descriptors: &Path, dir: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let model = load_model(model).map_err(|e| Fatal::new("load", e))?;
    let items = load_descriptors(descriptors).map_err(|e| Fatal::new("load", e))?;
    let mut classes = model.class_index.clone();
    let mut actual = Vec::with_capacity(items.len());
    let mut predicted = Vec::with_capacity(items.len());
    for item in &items {
        let p = model
            .predict(&item.descriptor.values)
            .map_err(|e| Fatal::new("predict", e))?;
        if !classes.contains(&item.label) {
            classes.push(item.label.clone());
        }
        actual.push(item.label.clone());
        predicted.push(p.label);
    }
    let cm = confusion(&actual, &predicted, &classes).map_err(|e| Fatal::new("eval", e))?;
    let conf = confusion_csv(&cm);
    let metrics = metrics_csv(&cm).map_err(|e| Fatal::new("eval", e))?;
    match dir {
        Some(d) => {
            fs::create_dir_all(d).map_err(|e| Fatal::io("write", d, e))?;
            let cpath = d.join("confusion.csv");
            let mpath = d.join("metrics.csv");
            fs::write(&cpath, &conf).map_err(|e| Fatal::io("write", &cpath, e))?;
            fs::write(&mpath, &metrics).map_err(|e| Fatal::io("write", &mpath, e))?;
            let acc = cm
                .accuracy()
                .map_or("n/a".to_string(), |a| format!("{:.2}%", 100.0 * a));
            let _ = writeln!(out, "{} samples, accuracy {acc}", cm.total());
            let _ = writeln!(out, "wrote {} and {}", cpath.display(), mpath.display());
        }
        None => {
            let _ = write!(out, "{conf}\n{metrics}");
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sort_sim(
    scene: &Path,
    model: &Path,
    dh_table: Option<&Path>,
    bins: &Path,
    current: &JointConfig,
    options: &SortOptions,
    dir: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let loaded = load_pcd(scene).map_err(|e| Fatal::new("load", e))?;
    let model = load_model(model).map_err(|e| Fatal::new("load", e))?;
    let dh = match dh_table {
        Some(p) => load_dh_table(p).map_err(|e| Fatal::new("config", e))?,
        None => DhParameters::ur5(),
    };
    let bins = load_bin_map(bins).map_err(|e| Fatal::new("config", e))?;
    let report = sort_scene(&loaded.cloud, &model, &dh, &bins, current, options).map_err(|e| match e {
        crate::pipeline::SortError::Segment(s) => Fatal::new("segment", s),
        other => Fatal(format!("segment: NoObjects: {other}")),
    })?;
    let _ = write!(out, "{}", report.to_text());
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| Fatal::io("write", d, e))?;
        let path = d.join("sort_report.txt");
        fs::write(&path, report.to_key_value()).map_err(|e| Fatal::io("write", &path, e))?;
    }
    Ok(if report.completed() > 0 {
        EXIT_OK
    } else {
        EXIT_ITEM_FAILURES
    })
}

fn cmd_split(
    root: &Path,
    protocol: Protocol,
    train: usize,
    test: usize,
    seed: u64,
    dir: &Path,
    out: &mut dyn Write,
) -> Outcome {
    let index = scan_dataset(root).map_err(|e| Fatal::io("scan", root, e))?;
    let split = match protocol {
        Protocol::Category => split_category_level(&index, train, test, seed),
        Protocol::Alternating => split_alternating_contiguous(&index, train, test, seed),
    }
    .map_err(|e| Fatal::new("split", e))?;
    fs::create_dir_all(dir).map_err(|e| Fatal::io("write", dir, e))?;
    for (name, ids) in [("train.txt", &split.train), ("test.txt", &split.test)] {
        let text: String = ids
            .iter()
            .map(|&i| {
                let r = &index.records[i];
                format!("{} {} {}\n", r.path, r.category, r.instance)
            })
            .collect();
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Fatal::io("write", &path, e))?;
    }
    let _ = writeln!(
        out,
        "{} records: {} train, {} test",
        index.records.len(),
        split.train.len(),
        split.test.len()
    );
    Ok(EXIT_OK)
}
