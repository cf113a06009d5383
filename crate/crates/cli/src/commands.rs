//! One method per subcommand. Each reads its inputs through the context (so
//! their digests land in the manifest) and returns JSON plus a CSV table.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use turanpat_core::construction::{build_construction, max_pn, ratio_sequence, PartSizeTree};
use turanpat_core::embedding::{
    canonical_form, check_rigidity, embeds_into_p_construction, ex_bruteforce, forbidden_family,
};
use turanpat_core::hypergraph::min_degree_report;
use turanpat_core::irrational::verify_irrational_certificate;
use turanpat_core::lagrangian::{is_minimal, maximize_lagrangian, LagrangianConfig};
use turanpat_core::limits::{
    ct_condition3_check, ct_gap, edge_density, hom_density, hypergraph_lagrangian,
    uniform_point_value,
};
use turanpat_core::{Caps, Hypergraph, Pattern};

use crate::render::{self, branch, fmt_f64, rational, sha256_hex, FileDigest, Outcome, Table};
use crate::{Format, UsageError};

pub struct Context {
    pub caps: Caps,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

fn outcome(json: Value, table: Table, format: Format, negative: bool) -> Result<Outcome> {
    Ok(Outcome {
        json,
        table,
        format,
        negative,
    })
}

impl Context {
    pub fn new(caps: Caps) -> Self {
        Context {
            caps,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path)
            .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(FileDigest {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes)
            .map_err(|_| UsageError(format!("{} is not UTF-8", path.display())).into())
    }

    fn write(&mut self, path: &Path, text: &str) -> Result<()> {
        std::fs::write(path, text)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(FileDigest {
            path: path.to_path_buf(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(())
    }

    fn pattern(&mut self, path: &Path) -> Result<Pattern> {
        let text = self.read(path)?;
        Pattern::parse(&text).with_context(|| format!("pattern file {}", path.display()))
    }

    fn graph(&mut self, path: &Path) -> Result<Hypergraph> {
        let text = self.read(path)?;
        Hypergraph::parse(&text).with_context(|| format!("hypergraph file {}", path.display()))
    }

    /// Every `*.hg` file of `dir`, sorted by file name.
    fn family(&mut self, dir: &Path) -> Result<Vec<(String, Hypergraph)>> {
        let entries = std::fs::read_dir(dir)
            .map_err(|e| UsageError(format!("cannot read directory {}: {e}", dir.display())))?;
        let mut files = Vec::new();
        for entry in entries {
            let path = entry?.path();
            if path.extension().is_some_and(|x| x == "hg") {
                files.push(path);
            }
        }
        files.sort();
        files
            .into_iter()
            .map(|path| {
                let name = path
                    .file_name()
                    .expect("listed file")
                    .to_string_lossy()
                    .into_owned();
                Ok((name, self.graph(&path)?))
            })
            .collect()
    }

    pub fn lagrangian(
        &mut self,
        path: &Path,
        cfg: &LagrangianConfig,
        format: Format,
    ) -> Result<Outcome> {
        let p = self.pattern(path)?;
        let r = maximize_lagrangian(&p, cfg)?;
        let json = json!({ "pattern": render::pattern(&p), "config": cfg, "result": render::lagrangian(&r) });
        outcome(json, render::lagrangian_table(&r), format, false)
    }

    pub fn pn(
        &mut self,
        path: &Path,
        n: usize,
        witness: bool,
        graph_out: Option<&Path>,
        format: Format,
    ) -> Result<Outcome> {
        let p = self.pattern(path)?;
        let r = max_pn(&p, n);
        let rows = if n >= p.k() {
            ratio_sequence(&p, n)?
        } else {
            Vec::new()
        };
        let mut table = Table::new(vec!["n", "pn", "density_exact", "density"]);
        for row in &rows {
            table.push(vec![
                row.n.to_string(),
                row.pn.to_string(),
                row.density.to_string(),
                fmt_f64(row.density.to_f64().unwrap_or(f64::NAN)),
            ]);
        }
        let mut json = json!({
            "pattern": render::pattern(&p),
            "n": n,
            "pn": r.value.to_string(),
            "optimal_splits": r.optimal_splits,
            "sequence": rows.iter().map(|row| json!({
                "n": row.n,
                "pn": row.pn.to_string(),
                "density": rational(&row.density),
            })).collect::<Vec<_>>(),
        });
        if witness || graph_out.is_some() {
            let g = build_construction(&p, &r.witness)?;
            if witness {
                let d = min_degree_report(&g);
                json["witness"] = render::tree(&r.witness);
                json["degrees"] = json!({ "min": d.min, "max": d.max, "argmin": d.argmin });
            }
            if let Some(out) = graph_out {
                self.write(out, &g.to_text())?;
            }
        }
        outcome(json, table, format, false)
    }

    pub fn minimal(
        &mut self,
        path: &Path,
        cfg: &LagrangianConfig,
        tol: f64,
        format: Format,
    ) -> Result<Outcome> {
        let p = self.pattern(path)?;
        let r = is_minimal(&p, cfg, tol)?;
        let mut table = Table::new(vec!["part", "margin"]);
        for (i, m) in r.margins.iter().enumerate() {
            table.push(vec![(i + 1).to_string(), fmt_f64(*m)]);
        }
        let json = json!({
            "pattern": render::pattern(&p),
            "minimal": r.minimal,
            "value": r.value,
            "margins": r.margins.iter().enumerate()
                .map(|(i, m)| json!({ "part": i + 1, "margin": m }))
                .collect::<Vec<_>>(),
            "margin_tol": tol,
            "converged": r.converged,
            "config": cfg,
        });
        outcome(json, table, format, !r.minimal)
    }

    pub fn forbid(
        &mut self,
        path: &Path,
        max_vertices: usize,
        minimal: bool,
        dir: &Path,
        format: Format,
    ) -> Result<Outcome> {
        let p = self.pattern(path)?;
        let family = forbidden_family(&p, max_vertices, minimal, &self.caps)?;
        std::fs::create_dir_all(dir)
            .map_err(|e| UsageError(format!("cannot create {}: {e}", dir.display())))?;
        let mut table = Table::new(vec!["file", "n", "edges", "canonical"]);
        let mut members = Vec::new();
        for (i, g) in family.iter().enumerate() {
            let file = format!("member_{:04}_v{}_e{}.hg", i + 1, g.n(), g.edge_count());
            let canonical = hex::encode(canonical_form(g, &self.caps)?);
            self.write(&dir.join(&file), &g.to_text())?;
            table.push(vec![
                file.clone(),
                g.n().to_string(),
                g.edge_count().to_string(),
                canonical.clone(),
            ]);
            members.push(json!({ "file": file, "n": g.n(), "edges": g.edge_count(), "canonical": canonical }));
        }
        let json = json!({
            "pattern": render::pattern(&p),
            "max_vertices": max_vertices,
            "minimal": minimal,
            "count": family.len(),
            "members": members,
        });
        let mut index = serde_json::to_string_pretty(&json).expect("JSON values serialize");
        index.push('\n');
        self.write(&dir.join("index.json"), &index)?;
        outcome(json, table, format, false)
    }

    pub fn embed(&mut self, pattern: &Path, graph: &Path, format: Format) -> Result<Outcome> {
        let p = self.pattern(pattern)?;
        let g = self.graph(graph)?;
        let w = embeds_into_p_construction(&g, &p)?;
        let mut table = Table::new(vec!["vertex", "branch"]);
        if let Some(w) = &w {
            for (v, b) in w.branches.iter().enumerate() {
                table.push(vec![v.to_string(), branch(b)]);
            }
        }
        let json = json!({
            "embeds": w.is_some(),
            "witness": w.as_ref().map(|w| json!({
                "branches": w.branches.iter()
                    .map(|b| b.iter().map(|i| i + 1).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })),
        });
        outcome(json, table, format, w.is_none())
    }

    pub fn exact_ex(
        &mut self,
        pattern: Option<&Path>,
        family_dir: Option<&Path>,
        n: usize,
        k: Option<usize>,
        format: Format,
    ) -> Result<Outcome> {
        let (k, family, source, pn) = match (pattern, family_dir) {
            (Some(path), None) => {
                let p = self.pattern(path)?;
                let family = forbidden_family(&p, n, false, &self.caps)?;
                let pn = max_pn(&p, n).value;
                (
                    p.k(),
                    family,
                    json!({ "pattern": render::pattern(&p) }),
                    Some(pn),
                )
            }
            (None, Some(dir)) => {
                let named = self.family(dir)?;
                let k = match (k, named.first()) {
                    (Some(k), _) => k,
                    (None, Some((_, g))) => g.k(),
                    (None, None) => bail!(UsageError("empty family directory; pass --k".into())),
                };
                let files: Vec<&str> = named.iter().map(|(f, _)| f.as_str()).collect();
                let source = json!({ "family_files": files });
                (k, named.into_iter().map(|(_, g)| g).collect(), source, None)
            }
            _ => bail!(UsageError(
                "give exactly one of --pattern and --family".into()
            )),
        };
        let r = ex_bruteforce(n, k, &family, &self.caps)?;
        let mut table = Table::new(vec!["n", "ex", "family_size", "extremal_classes", "pn"]);
        table.push(vec![
            n.to_string(),
            r.value.to_string(),
            family.len().to_string(),
            r.extremal_graphs.len().to_string(),
            pn.as_ref().map(|v| v.to_string()).unwrap_or_default(),
        ]);
        let json = json!({
            "source": source,
            "n": n,
            "k": k,
            "ex": r.value,
            "family_size": family.len(),
            "extremal_graphs": r.extremal_graphs.iter().map(render::graph).collect::<Vec<_>>(),
            "pn": pn.as_ref().map(|v| v.to_string()),
            "matches_pn": pn.as_ref().map(|v| *v == r.value.into()),
        });
        outcome(json, table, format, false)
    }

    pub fn rigid(&mut self, path: &Path, sizes: &[usize], format: Format) -> Result<Outcome> {
        let p = self.pattern(path)?;
        // Recursive parts receive an optimal construction of their size.
        let children: BTreeMap<usize, PartSizeTree> = p
            .recursive()
            .iter()
            .filter(|&&r| r < sizes.len())
            .map(|&r| (r, max_pn(&p, sizes[r]).witness))
            .filter(|(_, t)| !matches!(t, PartSizeTree::Empty { .. }))
            .collect();
        let t = PartSizeTree::Split {
            sizes: sizes.to_vec(),
            children,
        };
        t.validate(&p)?;
        let r = check_rigidity(&t, &p, &self.caps)?;
        let mut table = Table::new(vec!["rigid", "hosts_checked", "counterexample"]);
        let counter = r
            .counterexample
            .as_ref()
            .map(|c| c.iter().map(|i| i + 1).collect::<Vec<_>>());
        table.push(vec![
            r.rigid.to_string(),
            r.hosts_checked.to_string(),
            counter
                .as_ref()
                .map(|c| {
                    c.iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default(),
        ]);
        let json = json!({
            "pattern": render::pattern(&p),
            "tree": render::tree(&t),
            "rigid": r.rigid,
            "parts": r.parts.iter().enumerate()
                .map(|(i, vs)| json!({ "part": i + 1, "vertices": vs }))
                .collect::<Vec<_>>(),
            "counterexample": counter,
            "hosts_checked": r.hosts_checked,
        });
        outcome(json, table, format, !r.rigid)
    }

    pub fn irrational(
        &mut self,
        k: usize,
        tol: f64,
        cfg: &LagrangianConfig,
        format: Format,
    ) -> Result<Outcome> {
        let c = verify_irrational_certificate(k, tol, cfg)?;
        let mut table = Table::new(vec![
            "k",
            "ell",
            "root",
            "lambda_closed_form",
            "lambda_numeric",
            "poly_residual",
            "stationarity_residual",
            "passed",
        ]);
        table.push(vec![
            c.k.to_string(),
            c.ell.to_string(),
            fmt_f64(c.root),
            fmt_f64(c.lambda_closed_form),
            fmt_f64(c.lambda_numeric),
            fmt_f64(c.poly_residual),
            fmt_f64(c.stationarity_residual),
            c.passed.to_string(),
        ]);
        let json = json!({
            "k": c.k,
            "ell": c.ell,
            "pattern": render::pattern(&c.pattern),
            "root": c.root,
            "numeric_root": c.numeric_root,
            "lambda_closed_form": c.lambda_closed_form,
            "lambda_numeric": c.lambda_numeric,
            "difference": (c.lambda_closed_form - c.lambda_numeric).abs(),
            "poly_residual": c.poly_residual,
            "stationarity_residual": c.stationarity_residual,
            "tol": c.tol,
            "passed": c.passed,
            "config": cfg,
        });
        outcome(json, table, format, !c.passed)
    }

    pub fn homdensity(&mut self, f: &Path, g: &Path, format: Format) -> Result<Outcome> {
        let f = self.graph(f)?;
        let g = self.graph(g)?;
        let r = hom_density(&f, &g, &self.caps)?;
        let mut table = Table::new(vec!["t_exact", "t", "hom_count", "map_count"]);
        table.push(vec![
            r.t_value.to_string(),
            fmt_f64(r.t_f64()),
            r.hom_count.to_string(),
            r.map_count.to_string(),
        ]);
        let json = json!({
            "t": rational(&r.t_value),
            "hom_count": r.hom_count.to_string(),
            "map_count": r.map_count.to_string(),
        });
        outcome(json, table, format, false)
    }

    pub fn hlagrangian(
        &mut self,
        path: &Path,
        cfg: &LagrangianConfig,
        format: Format,
    ) -> Result<Outcome> {
        let g = self.graph(path)?;
        let r = hypergraph_lagrangian(&g, cfg)?;
        let json = json!({
            "graph": { "n": g.n(), "k": g.k(), "edges": g.edge_count() },
            "edge_density": rational(&edge_density(&g)),
            "uniform_point_value": rational(&uniform_point_value(&g)),
            "config": cfg,
            "result": render::lagrangian(&r),
        });
        outcome(json, render::lagrangian_table(&r), format, false)
    }

    pub fn ctgap(
        &mut self,
        path: &Path,
        family_dir: Option<&Path>,
        cfg: &LagrangianConfig,
        format: Format,
    ) -> Result<Outcome> {
        let g = self.graph(path)?;
        let gap = ct_gap(&g, cfg)?;
        let named = match family_dir {
            Some(dir) => self.family(dir)?,
            None => Vec::new(),
        };
        let family: Vec<Hypergraph> = named.iter().map(|(_, f)| f.clone()).collect();
        let violations = ct_condition3_check(&g, &family);
        let mut table = Table::new(vec![
            "density_exact",
            "density",
            "lagrangian",
            "gap",
            "violations",
        ]);
        table.push(vec![
            gap.density.to_string(),
            fmt_f64(gap.density.to_f64().unwrap_or(f64::NAN)),
            fmt_f64(gap.lagrangian),
            fmt_f64(gap.gap),
            violations.len().to_string(),
        ]);
        let json = json!({
            "density": rational(&gap.density),
            "lagrangian": gap.lagrangian,
            "gap": gap.gap,
            "config": cfg,
            "violations": violations.iter().map(|v| json!({
                "file": named[v.index].0,
                "member_density": rational(&v.member_density),
                "embedding": v.embedding,
            })).collect::<Vec<_>>(),
        });
        outcome(json, table, format, false)
    }
}
