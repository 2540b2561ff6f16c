//! Output files for a planning run and heatmap rendering.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::clustering::AssignMode;
use crate::ingest::{read_matrix_csv, write_matrix_csv};
use crate::matrix::Matrix;
use crate::plan::PlanReport;
use crate::scalar::Scalar;

pub const CLUSTERS_CSV: &str = "clusters.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const SIMILARITY_CSV: &str = "similarity.csv";
pub const GATEWAY_SIMILARITY_CSV: &str = "gateway_similarity.csv";
pub const GATEWAY_INTER_CSV: &str = "gateway_inter.csv";
pub const SIMILARITY_PGM: &str = "similarity.pgm";
pub const GATEWAY_SIMILARITY_PGM: &str = "gateway_similarity.pgm";
pub const NODES_CLUSTERS_CSV: &str = "nodes_clusters.csv";
pub const EIGENVALUES_CSV: &str = "eigenvalues.csv";

/// Matrix cell format for similarity outputs: ten significant digits.
pub fn format_similarity<T: Scalar>(v: T) -> String {
    format!("{v:.9e}")
}

/// Binary greyscale PGM (P5), one pixel per cell, row 0 at the top.
/// Cell value `v` maps to intensity `round(255 (1 - v))`.
pub fn heatmap_pgm<T: Scalar>(m: &Matrix<T>) -> io::Result<Vec<u8>> {
    let mut out = format!("P5\n{} {}\n255\n", m.cols(), m.rows()).into_bytes();
    for &v in m.as_slice() {
        let v = v.as_f64();
        if !(0.0..=1.0).contains(&v) {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("heatmap value {v} outside [0, 1]"),
            ));
        }
        out.push((255.0 * (1.0 - v)).round() as u8);
    }
    Ok(out)
}

pub fn render_heatmap<T: Scalar>(m: &Matrix<T>, path: impl AsRef<Path>) -> io::Result<()> {
    let bytes = heatmap_pgm(m)?;
    write_atomically(path.as_ref(), &bytes)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn matrix_csv<T: Scalar>(ids: &[&str], m: &Matrix<T>) -> Vec<u8> {
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, ids, m, format_similarity).expect("writing to memory");
    buf
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// All output files as `(file name, contents)`, in a fixed order.
pub fn render_outputs<T: Scalar>(
    report: &PlanReport<T>,
    dump_eigenvalues: bool,
) -> io::Result<Vec<(&'static str, Vec<u8>)>> {
    let ids = report.roster.ids();
    let labels = &report.assignment.labels;
    let plan = &report.gateways;

    let mut clusters = String::from("node_id,cluster_id,role,gateway_score\n");
    let mut nodes = String::from("id,lat,lon,cluster,role\n");
    for (i, node) in report.roster.nodes().iter().enumerate() {
        let role = plan.role_of(i).as_str();
        let _ = writeln!(
            clusters,
            "{},{},{},{}",
            node.id,
            labels[i],
            role,
            format_similarity(report.gateway_scores[i])
        );
        let _ = writeln!(
            nodes,
            "{},{},{},{},{}",
            node.id,
            fmt_opt(node.latitude),
            fmt_opt(node.longitude),
            labels[i],
            role
        );
    }

    let gw_ids: Vec<&str> = plan.gateway_set.iter().map(|&g| ids[g]).collect();
    let mut files = vec![
        (CLUSTERS_CSV, clusters.into_bytes()),
        (SUMMARY_TXT, summary_text(report).into_bytes()),
        (SIMILARITY_CSV, matrix_csv(&ids, report.similarity.values())),
        (GATEWAY_SIMILARITY_CSV, matrix_csv(&gw_ids, &plan.s_g)),
        (GATEWAY_INTER_CSV, matrix_csv(&gw_ids, &plan.s_inter_g)),
        (SIMILARITY_PGM, heatmap_pgm(report.similarity.values())?),
        (GATEWAY_SIMILARITY_PGM, heatmap_pgm(&plan.s_g)?),
        (NODES_CLUSTERS_CSV, nodes.into_bytes()),
    ];
    if dump_eigenvalues {
        let mut s = String::new();
        for v in &report.embedding.eigenvalues {
            let _ = writeln!(s, "{v:.12e}");
        }
        files.push((EIGENVALUES_CSV, s.into_bytes()));
    }
    Ok(files)
}

pub fn summary_text<T: Scalar>(report: &PlanReport<T>) -> String {
    let ids = report.roster.ids();
    let join = |v: &[usize]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut s = String::new();
    let _ = writeln!(s, "nodes: {}", report.n());
    let _ = writeln!(s, "clusters: {}", report.k());
    let _ = writeln!(s, "cluster_sizes: {}", join(&report.assignment.sizes()));
    let _ = writeln!(s, "pl_max_db: {:.2}", report.budget.pl_max_db.as_f64());
    let _ = writeln!(s, "pl_min_db: {:.6}", report.pl_min_db.as_f64());
    let _ = writeln!(s, "alpha_per_db: {:.9e}", report.similarity.alpha().as_f64());
    let _ = writeln!(s, "unusable_links: {}", report.unusable_links);
    let _ = writeln!(s, "connected_components: {}", report.component_count());
    let isolated: Vec<&str> = report.isolated.iter().map(|&i| ids[i]).collect();
    let _ = writeln!(
        s,
        "isolated_nodes: {}",
        if isolated.is_empty() {
            "none".to_string()
        } else {
            isolated.join(",")
        }
    );
    let _ = writeln!(s, "embedding_dim: {}", report.embedding.d);
    let eig: Vec<String> = report
        .embedding
        .eigenvalues
        .iter()
        .map(|v| format!("{:.9e}", v.as_f64()))
        .collect();
    let _ = writeln!(s, "eigenvalues: {}", eig.join(","));
    let mode = match report.mode {
        AssignMode::Exact => "exact",
        AssignMode::Greedy => "greedy",
    };
    let _ = writeln!(s, "assignment_mode: {mode}");
    let _ = writeln!(s, "iterations: {}", report.assignment.iterations);
    let _ = writeln!(s, "inertia: {:.9e}", report.assignment.inertia.as_f64());
    let _ = writeln!(s, "gateways: {}", report.gateways.gateway_set.len());
    for c in &report.gateways.clusters {
        let _ = writeln!(
            s,
            "cluster {}: primary={} secondary={}",
            c.cluster_id,
            ids[c.primary],
            c.secondary.map_or("none", |g| ids[g])
        );
    }
    s
}

/// Writes every file to a hidden temporary name in `dir`, then renames them
/// into place. `dir` is created if needed.
pub fn write_outputs(dir: &Path, files: &[(&str, Vec<u8>)]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let staged: Vec<_> = files
        .iter()
        .map(|(name, bytes)| {
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, bytes).map(|_| (tmp, dir.join(name)))
        })
        .collect::<io::Result<_>>()?;
    for (tmp, dest) in staged {
        fs::rename(tmp, dest)?;
    }
    Ok(())
}

/// Rebuilds the heatmaps of an existing output directory from its matrix CSVs.
pub fn rerender_heatmaps(dir: &Path) -> Result<(), crate::plan::PlanError> {
    for (csv, pgm) in [
        (SIMILARITY_CSV, SIMILARITY_PGM),
        (GATEWAY_SIMILARITY_CSV, GATEWAY_SIMILARITY_PGM),
    ] {
        let file = fs::File::open(dir.join(csv)).map_err(|source| {
            crate::ingest::IngestError::Io {
                path: dir.join(csv).display().to_string(),
                source,
            }
        })?;
        let m = read_matrix_csv::<f64, _>(file)?;
        render_heatmap(&m.values, dir.join(pgm))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pixels(bytes: &[u8]) -> &[u8] {
        // header is three newline-terminated lines
        let mut seen = 0;
        let start = bytes
            .iter()
            .position(|&b| {
                if b == b'\n' {
                    seen += 1;
                }
                seen == 3
            })
            .unwrap();
        &bytes[start + 1..]
    }

    #[test]
    fn all_zero_is_white() {
        let img = heatmap_pgm(&Matrix::<f64>::zeros(2, 2)).unwrap();
        assert!(img.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(pixels(&img), &[255, 255, 255, 255]);
    }

    #[test]
    fn one_is_black_at_its_cell() {
        let mut m = Matrix::<f64>::zeros(2, 3);
        m[(1, 2)] = 1.0;
        let img = heatmap_pgm(&m).unwrap();
        assert!(img.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(pixels(&img), &[255, 255, 255, 255, 255, 0]);
    }

    #[test]
    fn out_of_range_rejected() {
        let m = Matrix::<f64>::filled(1, 1, 1.5);
        assert!(heatmap_pgm(&m).is_err());
    }
}
