//! Success-rate sweeps over grids of model points, with CSV, JSON and SVG output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::batch::{run_batch, BatchSpec};
use crate::combinatorics::DEFAULT_CLASS_CAP;
use crate::error::{Error, Result};
use crate::model::{Family, Instance, ModelConfig};
use crate::numeric::ext_f64;
use crate::thresholds::{classify_with, statistic, Classification, ThresholdParams, ThresholdReport};

pub const SWEEP_SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 18] = [
    "n",
    "r",
    "k",
    "m",
    "p",
    "q",
    "trials",
    "successes",
    "rate",
    "wilson_low",
    "wilson_high",
    "d_pq",
    "mi_upper",
    "fano_floor",
    "lower_rhs",
    "upper_rhs",
    "classification",
    "schema_version",
];

/// A grid file: either an explicit `points` list, or a shape `n, r, k, m`
/// with `p` and `q` value lists whose product is taken (diagonal skipped).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<ModelConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
}

impl GridFile {
    pub fn product(n: usize, r: usize, k: usize, m: usize, p: Vec<f64>, q: Vec<f64>) -> Self {
        Self { n: Some(n), r: Some(r), k: Some(k), m: Some(m), p: Some(p), q: Some(q), ..Self::default() }
    }

    pub fn from_points(points: Vec<ModelConfig>) -> Self {
        Self { points: Some(points), ..Self::default() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedGrid(e.to_string()))
    }

    /// The grid points in file order (`p` outer, `q` inner for products).
    pub fn expand(&self) -> Result<Vec<Instance>> {
        let bad = |s: &str| Error::MalformedGrid(s.into());
        let shape = [self.n, self.r, self.k, self.m];
        let has_product = shape.iter().any(Option::is_some) || self.p.is_some() || self.q.is_some();
        let configs = match (&self.points, has_product) {
            (Some(_), true) => return Err(bad("give either `points` or a product grid, not both")),
            (None, false) => return Err(bad("grid has neither `points` nor `n, r, k, m, p, q`")),
            (Some(points), false) => points.clone(),
            (None, true) => {
                let (Some(n), Some(r), Some(k), Some(m)) = (self.n, self.r, self.k, self.m) else {
                    return Err(bad("product grid needs all of n, r, k, m"));
                };
                let (Some(ps), Some(qs)) = (&self.p, &self.q) else {
                    return Err(bad("product grid needs `p` and `q` lists"));
                };
                let mut out = Vec::new();
                for &p in ps {
                    for &q in qs {
                        if p != q {
                            out.push(ModelConfig::new(n, r, k, m, p, q).map_err(|e| bad(&e.to_string()))?);
                        }
                    }
                }
                out
            }
        };
        if configs.is_empty() {
            return Err(bad("grid is empty"));
        }
        Family::parse(self.family.as_deref().unwrap_or("bernoulli"), self.precision)
            .map_err(|e| bad(&e.to_string()))?;
        let instances: Vec<Instance> = configs
            .into_iter()
            .map(|config| Instance { config, family: self.family.clone(), precision: self.precision, dist_in: None, dist_out: None })
            .collect();
        for inst in &instances {
            inst.distributions().map_err(|e| bad(&e.to_string()))?;
        }
        Ok(instances)
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub points: Vec<Instance>,
    pub trials: u64,
    /// Shared by every point, so neighbouring points see common random numbers.
    pub base_seed: u64,
    pub jobs: Option<usize>,
    pub params: ThresholdParams,
    pub cap: u64,
}

impl SweepSpec {
    pub fn new(points: Vec<Instance>, trials: u64, base_seed: u64) -> Self {
        Self { points, trials, base_seed, jobs: None, params: ThresholdParams::default(), cap: DEFAULT_CLASS_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// Bernoulli weights only.
    #[serde(with = "ext_f64::option")]
    pub d_pq: Option<f64>,
    #[serde(with = "ext_f64::option")]
    pub mi_upper: Option<f64>,
    pub fano_floor: Option<f64>,
    pub lower_rhs: f64,
    pub upper_rhs: f64,
    pub classification: Classification,
    pub schema_version: u32,
    pub threshold_report: ThresholdReport,
}

impl SweepRow {
    pub fn config(&self) -> ModelConfig {
        self.threshold_report.config
    }

    fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(ext_f64::format_ext).unwrap_or_default();
        vec![
            self.n.to_string(),
            self.r.to_string(),
            self.k.to_string(),
            self.m.to_string(),
            self.p.to_string(),
            self.q.to_string(),
            self.trials.to_string(),
            self.successes.to_string(),
            self.rate.to_string(),
            self.wilson_low.to_string(),
            self.wilson_high.to_string(),
            opt(self.d_pq),
            opt(self.mi_upper),
            opt(self.fano_floor),
            self.lower_rhs.to_string(),
            self.upper_rhs.to_string(),
            self.classification.as_str().to_string(),
            self.schema_version.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub base_seed: u64,
    pub trials: u64,
    pub params: ThresholdParams,
    pub family: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(CSV_COLUMNS).map_err(io)?;
        for row in &self.rows {
            out.write_record(row.csv_record()).map_err(io)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
    }
}

/// One batch per grid point, joined with its threshold report.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.points.is_empty() {
        return Err(Error::MalformedGrid("grid is empty".into()));
    }
    spec.params.validate()?;
    let mut family = None;
    let mut rows = Vec::with_capacity(spec.points.len());
    for inst in &spec.points {
        let (din, dout) = inst.distributions()?;
        let fam = din.family().name().to_string();
        match &family {
            None => family = Some(fam.clone()),
            Some(f) if *f != fam => return Err(Error::MalformedGrid("mixed weight families in one sweep".into())),
            _ => {}
        }
        let mut batch = BatchSpec::new(inst.config, din, dout, spec.trials, spec.base_seed);
        batch.jobs = spec.jobs;
        batch.cap = spec.cap;
        let res = run_batch(&batch)?;
        let report = classify_with(&inst.config, &spec.params, &din, &dout)?;
        let bernoulli = din.bernoulli_mean().is_some() && dout.bernoulli_mean().is_some();
        let c = inst.config;
        rows.push(SweepRow {
            n: c.n,
            r: c.r,
            k: c.k,
            m: c.m,
            p: c.p,
            q: c.q,
            trials: res.trials,
            successes: res.successes,
            rate: res.rate,
            wilson_low: res.wilson_low,
            wilson_high: res.wilson_high,
            d_pq: bernoulli.then_some(report.d_pq),
            mi_upper: bernoulli.then_some(report.mi_upper),
            fano_floor: if bernoulli { report.fano_floor } else { None },
            lower_rhs: report.lower_rhs,
            upper_rhs: report.upper_rhs,
            classification: report.classification,
            schema_version: SWEEP_SCHEMA_VERSION,
            threshold_report: report,
        });
    }
    Ok(SweepResult {
        schema_version: SWEEP_SCHEMA_VERSION,
        base_seed: spec.base_seed,
        trials: spec.trials,
        params: spec.params,
        family: family.unwrap_or_default(),
        rows,
    })
}

/// A theory boundary `statistic(p, q) = rhs` traced as `q` against `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    /// `"lower"` or `"upper"`.
    pub kind: &'static str,
    pub rhs: f64,
    /// Separate branches for `q < p` and `q > p`.
    pub branches: Vec<Vec<(f64, f64)>>,
}

/// Bisects `f(x) = 0` on `[a, b]` given a sign change.
fn bisect(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> Option<f64> {
    let (fa, fb) = (f(a), f(b));
    if !fa.is_finite() && !fb.is_finite() || fa.signum() == fb.signum() {
        return None;
    }
    let neg_at_a = fa < 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if (f(mid) < 0.0) == neg_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Boundary curves of the shape shared by `template`, sampled at `ps`.
pub fn contours(template: &Instance, params: &ThresholdParams, rhs: (f64, f64), ps: &[f64]) -> Vec<Contour> {
    const EPS: f64 = 1e-9;
    let stat_at = |mode, p: f64, q: f64| -> f64 {
        let inst = Instance {
            config: ModelConfig { p, q, ..template.config },
            ..template.clone()
        };
        inst.distributions()
            .and_then(|(din, dout)| {
                statistic(&inst.config, mode, Some((din.sub_gaussian_sq(), dout.sub_gaussian_sq())))
            })
            .unwrap_or(f64::NAN)
    };
    [("lower", params.lower_mode, rhs.0), ("upper", params.upper_mode, rhs.1)]
        .into_iter()
        .map(|(kind, mode, level)| {
            let mut below = Vec::new();
            let mut above = Vec::new();
            for &p in ps {
                if p <= EPS || p >= 1.0 - EPS {
                    continue;
                }
                let g = |q: f64| stat_at(mode, p, q) - level;
                if let Some(q) = bisect(EPS, p - EPS, g) {
                    below.push((p, q));
                }
                if let Some(q) = bisect(p + EPS, 1.0 - EPS, g) {
                    above.push((p, q));
                }
            }
            Contour { kind, rhs: level, branches: vec![below, above].into_iter().filter(|b| !b.is_empty()).collect() }
        })
        .collect()
}

fn rate_color(rate: f64) -> String {
    // white at 0 to dark blue at 1
    let t = rate.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 8.0), lerp(255.0, 48.0), lerp(255.0, 107.0))
}

/// SVG heatmap of the success rate over a 2-D `(p, q)` grid with the lower
/// and upper boundary curves overlaid.
pub fn heatmap_svg(result: &SweepResult, template: &Instance) -> Result<String> {
    let rows = &result.rows;
    let first = rows.first().ok_or_else(|| Error::MalformedGrid("empty sweep".into()))?;
    let shape = (first.n, first.r, first.k, first.m);
    if rows.iter().any(|r| (r.n, r.r, r.k, r.m) != shape) {
        return Err(Error::MalformedGrid("heatmap needs one (n, r, k, m) shape".into()));
    }
    let uniq = |f: fn(&SweepRow) -> f64| -> Vec<f64> {
        let set: BTreeSet<u64> = rows.iter().map(|r| f(r).to_bits()).collect();
        let mut v: Vec<f64> = set.into_iter().map(f64::from_bits).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let ps = uniq(|r| r.p);
    let qs = uniq(|r| r.q);
    if ps.len() < 2 || qs.len() < 2 {
        return Err(Error::MalformedGrid("heatmap needs at least two p and two q values".into()));
    }
    let min_gap = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let (dp, dq) = (min_gap(&ps), min_gap(&qs));
    let (p_lo, p_hi) = (ps[0] - dp / 2.0, ps[ps.len() - 1] + dp / 2.0);
    let (q_lo, q_hi) = (qs[0] - dq / 2.0, qs[qs.len() - 1] + dq / 2.0);
    let (w, h, margin) = (480.0, 480.0, 50.0);
    let x = |p: f64| margin + (p - p_lo) / (p_hi - p_lo) * w;
    let y = |q: f64| margin + h - (q - q_lo) / (q_hi - q_lo) * h;
    let (cw, ch) = (dp / (p_hi - p_lo) * w, dq / (q_hi - q_lo) * h);

    let mut s = String::new();
    let total_w = w + 2.0 * margin;
    let total_h = h + 2.0 * margin;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" viewBox="0 0 {total_w} {total_h}" data-n="{}" data-r="{}" data-k="{}" data-m="{}">"#,
        shape.0, shape.1, shape.2, shape.3
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{total_w}" height="{total_h}" fill="white"/>"#);
    for row in rows {
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{cw:.3}" height="{ch:.3}" fill="{}" data-p="{}" data-q="{}" data-rate="{}"/>"#,
            x(row.p) - cw / 2.0,
            y(row.q) - ch / 2.0,
            rate_color(row.rate),
            row.p,
            row.q,
            row.rate
        );
    }
    let sample: Vec<f64> = (0..=96).map(|i| p_lo + (p_hi - p_lo) * i as f64 / 96.0).collect();
    let curves = contours(template, &result.params, (first.lower_rhs, first.upper_rhs), &sample);
    for c in &curves {
        let stroke = if c.kind == "lower" { "#d62728" } else { "#2ca02c" };
        for branch in &c.branches {
            let inside: Vec<(f64, f64)> =
                branch.iter().copied().filter(|&(_, q)| q >= q_lo && q <= q_hi).collect();
            if inside.len() < 2 {
                continue;
            }
            let pix: Vec<String> = inside.iter().map(|&(p, q)| format!("{:.3},{:.3}", x(p), y(q))).collect();
            let data: Vec<String> = inside.iter().map(|&(p, q)| format!("{p},{q}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{stroke}" stroke-width="2" points="{}" data-kind="{}" data-rhs="{}" data-points="{}"/>"#,
                pix.join(" "),
                c.kind,
                c.rhs,
                data.join(" ")
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">p</text>"#,
        margin + w / 2.0,
        total_h - 12.0
    );
    let _ = writeln!(s, r#"<text x="14" y="{}" font-size="14" text-anchor="middle">q</text>"#, margin + h / 2.0);
    for &p in &ps {
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{}" font-size="10" text-anchor="middle">{p}</text>"#,
            x(p),
            margin + h + 14.0
        );
    }
    for &q in &qs {
        let _ = writeln!(s, r#"<text x="{}" y="{:.3}" font-size="10" text-anchor="end">{q}</text>"#, margin - 4.0, y(q) + 3.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}
