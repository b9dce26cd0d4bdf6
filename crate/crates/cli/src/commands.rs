//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{error, info, warn};
use qus_core::classifier::{format_key_values, format_table, CvReport, CvScheme};
use qus_core::envelope::{detect_envelope, EnvelopeImage};
use qus_core::fractal::FeatureTable;
use qus_core::io::{load_envelope, load_rf, read_header, save_envelope, save_rf, HEADER_EXT};
use qus_core::models::ModelKind;
use qus_core::parametric::{save_map, ParametricImageSet};
use qus_core::phantom::{make_dataset, write_truth};
use qus_core::pipeline::{baseline_table, evaluate_table, fractal_table, parametric_sets};

use crate::config::AppConfig;

/// Number of inputs that could not be processed.
pub type Failures = usize;

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Container headers in `dir`, sorted by path.
fn headers_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read input directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some(HEADER_EXT))
        .collect();
    v.sort();
    Ok(v)
}

fn provenance_comment(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

pub fn simulate(cfg: &AppConfig, out: &Path) -> Result<Failures> {
    ensure_dir(out)?;
    let data = make_dataset(
        &cfg.class_a,
        &cfg.class_b,
        cfg.frames_per_class,
        cfg.groups_per_class,
        cfg.simulate_seed,
    )?;
    let provenance = vec![
        ("config_hash".to_string(), cfg.simulate_hash()),
        ("seed".to_string(), cfg.simulate_seed.to_string()),
    ];
    let mut manifest = provenance_comment(&provenance);
    manifest.push_str("frame_id,group_id,class_label,regime\n");
    for (frame, truth) in &data {
        let stem = out.join(&frame.frame_id);
        save_rf(frame, &stem, &provenance).with_context(|| format!("writing frame {}", frame.frame_id))?;
        let truth_path = out.join(format!("{}.truth", frame.frame_id));
        write_truth(truth, &truth_path, &provenance)?;
        let label = frame.class_label.map_or("none", |l| l.name());
        manifest.push_str(&format!(
            "{},{},{label},{}\n",
            frame.frame_id,
            frame.group_id,
            truth.regime.name()
        ));
    }
    write_file(&out.join("manifest.csv"), &manifest)?;
    print!("{manifest}");
    info!("wrote {} frames to {}", data.len(), out.display());
    Ok(0)
}

pub fn envelope(cfg: &AppConfig, input: &Path, out: &Path) -> Result<Failures> {
    ensure_dir(out)?;
    let provenance = cfg.pipeline.provenance();
    let mut failures = 0;
    for path in headers_in(input)? {
        let result = load_rf(&path).and_then(|frame| {
            let env = detect_envelope(&frame)?;
            save_envelope(&env, &out.join(&env.frame_id), &provenance)?;
            Ok(env.frame_id)
        });
        match result {
            Ok(id) => info!("envelope {id}"),
            Err(e) => {
                error!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    Ok(failures)
}

/// Loads every RF or envelope container in `dir`, detecting envelopes of RF
/// frames. Containers of other kinds are skipped.
fn load_envelopes(dir: &Path) -> Result<(Vec<EnvelopeImage>, Failures)> {
    let mut images = Vec::new();
    let mut failures = 0;
    for path in headers_in(dir)? {
        let loaded = read_header(&path).and_then(|h| match h.get("kind") {
            Some("rf") | None => load_rf(&path).and_then(|f| detect_envelope(&f)).map(Some),
            Some("envelope") => load_envelope(&path).map(Some),
            Some(_) => Ok(None),
        });
        match loaded {
            Ok(Some(img)) => images.push(img),
            Ok(None) => {}
            Err(e) => {
                error!("{}: {e}", path.display());
                failures += 1;
            }
        }
    }
    Ok((images, failures))
}

pub fn features(cfg: &AppConfig, input: &Path, out: &Path) -> Result<Failures> {
    ensure_dir(out)?;
    let (images, mut failures) = load_envelopes(input)?;
    if images.is_empty() {
        bail!("no RF or envelope files in {}", input.display());
    }
    let p = &cfg.pipeline;
    for &kind in &p.kinds {
        let mut sets: Vec<ParametricImageSet> = Vec::new();
        for (img, result) in images.iter().zip(parametric_sets(&images, kind, p)) {
            match result {
                Ok(set) => {
                    info!("{kind} maps for {}: {} fit failures", img.frame_id, set.fit_failures());
                    sets.push(set);
                }
                Err(e) => {
                    error!("{kind} maps for {}: {e}", img.frame_id);
                    failures += 1;
                }
            }
        }
        if sets.is_empty() {
            warn!("no {kind} maps; skipping tables");
            continue;
        }
        if cfg.save_maps {
            let dir = out.join("maps");
            for set in &sets {
                for m in &set.maps {
                    save_map(
                        m,
                        &dir.join(format!("{}_{}_{}", set.frame_id, kind.name(), m.parameter_name)),
                        &p.provenance(),
                    )?;
                }
            }
        }
        let fractal = fractal_table(&sets, kind, p)?;
        fractal.write(&out.join(format!("features_{}.csv", kind.name())))?;
        baseline_table(&sets, kind, p)?.write(&out.join(format!("baseline_{}.csv", kind.name())))?;
        info!(
            "{kind}: {} rows x {} features",
            fractal.rows.len(),
            fractal.columns.len()
        );
    }
    Ok(failures)
}

fn scheme_file_tag(s: &CvScheme) -> String {
    match s {
        CvScheme::LeaveOneGroupOut => "logo".into(),
        CvScheme::KFold { k } => format!("kfold{k}"),
    }
}

pub fn evaluate(cfg: &AppConfig, input: &Path, out: &Path) -> Result<Failures> {
    ensure_dir(out)?;
    let p = &cfg.pipeline;
    let mut failures = 0;
    // (kind, fractal reports, baseline reports), in canonical kind order
    let mut results: Vec<(ModelKind, Vec<CvReport>, Vec<CvReport>)> = Vec::new();
    for kind in ModelKind::ALL {
        let fpath = input.join(format!("features_{}.csv", kind.name()));
        if !fpath.exists() {
            continue;
        }
        let run = || -> Result<(Vec<CvReport>, Vec<CvReport>)> {
            let fractal = FeatureTable::read(&fpath)?;
            let fr = evaluate_table(&fractal, p).with_context(|| format!("evaluating {}", fpath.display()))?;
            let bpath = input.join(format!("baseline_{}.csv", kind.name()));
            let br = if bpath.exists() {
                evaluate_table(&FeatureTable::read(&bpath)?, p)
                    .with_context(|| format!("evaluating {}", bpath.display()))?
            } else {
                warn!("{} missing; no baseline for {kind}", bpath.display());
                Vec::new()
            };
            Ok((fr, br))
        };
        match run() {
            Ok((fr, br)) => results.push((kind, fr, br)),
            Err(e) => {
                error!("{e:#}");
                failures += 1;
            }
        }
    }
    if results.is_empty() {
        bail!("no evaluable feature tables in {}", input.display());
    }
    let header = provenance_comment(&p.provenance());
    let mut kv = header.clone();
    for (si, scheme) in p.schemes.iter().enumerate() {
        let folds = results[0].1[si].folds_per_repeat;
        let title = format!(
            "{} ({folds} folds, {} repeats)",
            scheme.name(),
            results[0].1[si].repeats()
        );
        let fcols: Vec<(String, &CvReport)> = results
            .iter()
            .map(|(k, fr, _)| (k.short_label().to_string(), &fr[si]))
            .collect();
        let table = format_table(&format!("fractal features, {title}"), &fcols);
        write_file(
            &out.join(format!("report_{}.csv", scheme_file_tag(scheme))),
            &(header.clone() + &table),
        )?;
        println!("{table}");
        let bcols: Vec<(String, &CvReport)> = results
            .iter()
            .filter(|(_, _, br)| !br.is_empty())
            .map(|(k, _, br)| (k.short_label().to_string(), &br[si]))
            .collect();
        if !bcols.is_empty() {
            let table = format_table(&format!("parametric baseline, {title}"), &bcols);
            write_file(
                &out.join(format!("report_{}_baseline.csv", scheme_file_tag(scheme))),
                &(header.clone() + &table),
            )?;
            println!("{table}");
        }
        let tag = scheme_file_tag(scheme);
        let fl: Vec<(String, &CvReport)> = fcols.iter().map(|(l, r)| (format!("{tag}.fractal.{l}"), *r)).collect();
        let bl: Vec<(String, &CvReport)> = bcols.iter().map(|(l, r)| (format!("{tag}.baseline.{l}"), *r)).collect();
        kv.push_str(&format_key_values(&fl));
        kv.push_str(&format_key_values(&bl));
    }
    write_file(&out.join("metrics.kv"), &kv)?;
    Ok(failures)
}

pub fn all(cfg: &AppConfig, out: &Path) -> Result<Failures> {
    let (rf, env, feat, rep) = (
        out.join("rf"),
        out.join("envelope"),
        out.join("features"),
        out.join("reports"),
    );
    let mut failures = simulate(cfg, &rf)?;
    failures += envelope(cfg, &rf, &env)?;
    failures += features(cfg, &env, &feat)?;
    failures += evaluate(cfg, &feat, &rep)?;
    Ok(failures)
}
