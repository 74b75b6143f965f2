//! The quadrant of opportunities: consumption versus footprint intensity per
//! category, split at the medians, with iso-share curves showing what share
//! of the total footprint a point represents.

use crate::error::{Error, Result};
use crate::footprint::CategoryFootprint;
use crate::num::Scalar;

/// Which footprint the quadrant is drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FootprintKind {
    Biodiversity,
    Carbon,
}

impl FootprintKind {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "bde" | "biodiversity" => Ok(FootprintKind::Biodiversity),
            "carbon" | "co2" | "co2e" => Ok(FootprintKind::Carbon),
            other => Err(Error::Config(format!("unknown footprint kind {other:?}"))),
        }
    }

    pub fn intensity_label(self) -> &'static str {
        match self {
            FootprintKind::Biodiversity => "Intensity (BDe/EUR)",
            FootprintKind::Carbon => "Intensity (kgCO2e/EUR)",
        }
    }
}

/// Quadrant corner of a category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    UpperLeft,
    UpperRight,
    LowerLeft,
    LowerRight,
}

impl Quadrant {
    pub fn as_str(self) -> &'static str {
        match self {
            Quadrant::UpperLeft => "upper-left",
            Quadrant::UpperRight => "upper-right",
            Quadrant::LowerLeft => "lower-left",
            Quadrant::LowerRight => "lower-right",
        }
    }
}

/// One category point of the quadrant.
#[derive(Debug, Clone)]
pub struct QuadrantDatum<S> {
    pub category: String,
    pub consumption_eur: S,
    pub intensity: S,
    /// Fraction of the total footprint: consumption * intensity / total.
    pub share: S,
    pub quadrant: Quadrant,
}

/// The full analysis behind one quadrant figure.
#[derive(Debug, Clone)]
pub struct QuadrantAnalysis<S> {
    pub kind: FootprintKind,
    pub data: Vec<QuadrantDatum<S>>,
    pub median_consumption: S,
    pub median_intensity: S,
    pub total_footprint: S,
    /// Share levels of the iso-share curves (e.g. 0.05 for 5%).
    pub iso_shares: Vec<S>,
}

fn median<S: Scalar>(values: &mut [S]) -> S {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / S::from_f64_lossy(2.0)
    }
}

/// Build the quadrant analysis from category footprints.
///
/// Categories without positive consumption cannot be placed on the (log)
/// consumption axis and are skipped. Quadrant labels compare strictly against
/// the medians; ties go lower/left.
pub fn quadrant_data<S: Scalar>(
    categories: &[CategoryFootprint<S>],
    kind: FootprintKind,
    iso_shares: &[S],
) -> Result<QuadrantAnalysis<S>> {
    let mut points: Vec<(String, S, S)> = Vec::new();
    for category in categories {
        if category.consumption_eur <= S::zero() {
            continue;
        }
        let footprint = match kind {
            FootprintKind::Biodiversity => category.bde.value,
            FootprintKind::Carbon => category.co2e_kg,
        };
        let intensity = footprint / category.consumption_eur;
        points.push((category.category.clone(), category.consumption_eur, intensity));
    }
    if points.is_empty() {
        return Err(Error::Invalid(
            "quadrant needs at least one category with positive consumption".into(),
        ));
    }

    let mut consumptions: Vec<S> = points.iter().map(|(_, c, _)| *c).collect();
    let mut intensities: Vec<S> = points.iter().map(|(_, _, m)| *m).collect();
    let median_consumption = median(&mut consumptions);
    let median_intensity = median(&mut intensities);
    let total_footprint: S = points.iter().map(|(_, c, m)| *c * *m).sum();

    let data = points
        .into_iter()
        .map(|(category, consumption, intensity)| {
            let share = if total_footprint.is_zero() {
                S::zero()
            } else {
                consumption * intensity / total_footprint
            };
            let upper = intensity > median_intensity;
            let right = consumption > median_consumption;
            let quadrant = match (upper, right) {
                (true, true) => Quadrant::UpperRight,
                (true, false) => Quadrant::UpperLeft,
                (false, true) => Quadrant::LowerRight,
                (false, false) => Quadrant::LowerLeft,
            };
            QuadrantDatum {
                category,
                consumption_eur: consumption,
                intensity,
                share,
                quadrant,
            }
        })
        .collect();

    Ok(QuadrantAnalysis {
        kind,
        data,
        median_consumption,
        median_intensity,
        total_footprint,
        iso_shares: iso_shares.to_vec(),
    })
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

/// Rendering options for the quadrant figure.
#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub title: String,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 860,
            height: 620,
            title: "Quadrant of opportunities".to_string(),
        }
    }
}

struct LogAxis {
    min_log: f64,
    max_log: f64,
    offset: f64,
    span: f64,
}

impl LogAxis {
    fn new(values: impl Iterator<Item = f64>, offset: f64, span: f64) -> Self {
        let mut min_log = f64::INFINITY;
        let mut max_log = f64::NEG_INFINITY;
        for v in values {
            if v > 0.0 && v.is_finite() {
                min_log = min_log.min(v.log10());
                max_log = max_log.max(v.log10());
            }
        }
        if !min_log.is_finite() || !max_log.is_finite() {
            min_log = 0.0;
            max_log = 1.0;
        }
        // pad half a decade on each side so points stay off the frame
        min_log -= 0.5;
        max_log += 0.5;
        if max_log - min_log < 1.0 {
            max_log = min_log + 1.0;
        }
        Self {
            min_log,
            max_log,
            offset,
            span,
        }
    }

    fn project(&self, value: f64) -> f64 {
        let t = (value.log10() - self.min_log) / (self.max_log - self.min_log);
        self.offset + t * self.span
    }

    fn decades(&self) -> Vec<i32> {
        let lo = self.min_log.ceil() as i32;
        let hi = self.max_log.floor() as i32;
        (lo..=hi).collect()
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Render the quadrant as a static SVG document.
///
/// Output bytes are deterministic for fixed input and configuration: all
/// coordinates are formatted with two decimals and element order follows the
/// input order.
pub fn render_quadrant<S: Scalar>(
    analysis: &QuadrantAnalysis<S>,
    config: &RenderConfig,
) -> String {
    let width = f64::from(config.width);
    let height = f64::from(config.height);
    let margin_left = 70.0;
    let margin_right = 30.0;
    let margin_top = 50.0;
    let margin_bottom = 60.0;
    let plot_w = width - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;

    let to_f = |v: S| v.to_f64().unwrap_or(f64::NAN);
    let xs = LogAxis::new(
        analysis.data.iter().map(|d| to_f(d.consumption_eur)),
        margin_left,
        plot_w,
    );
    // y grows downward in SVG; project into log space then flip
    let ys = LogAxis::new(analysis.data.iter().map(|d| to_f(d.intensity)), 0.0, plot_h);
    let y_pix = |value: f64| margin_top + plot_h - (ys.project(value) - ys.offset);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        config.width, config.height, config.width, config.height
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        fmt(width / 2.0),
        xml_escape(&config.title)
    ));

    // frame
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"#444444\" stroke-width=\"1\"/>\n",
        fmt(margin_left),
        fmt(margin_top),
        fmt(plot_w),
        fmt(plot_h)
    ));

    // decade ticks
    for decade in xs.decades() {
        let x = xs.project(10f64.powi(decade));
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"#cccccc\" \
             stroke-width=\"0.5\"/>\n",
            x = fmt(x),
            y0 = fmt(margin_top),
            y1 = fmt(margin_top + plot_h)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">1e{decade}</text>\n",
            fmt(x),
            fmt(margin_top + plot_h + 18.0)
        ));
    }
    for decade in ys.decades() {
        let y = y_pix(10f64.powi(decade));
        svg.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#cccccc\" \
             stroke-width=\"0.5\"/>\n",
            x0 = fmt(margin_left),
            x1 = fmt(margin_left + plot_w),
            y = fmt(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">1e{decade}</text>\n",
            fmt(margin_left - 6.0),
            fmt(y + 4.0)
        ));
    }

    // iso-share curves: intensity(c) = share * total / c, straight lines in
    // log-log space, sampled densely for portability
    let total = to_f(analysis.total_footprint);
    for share in &analysis.iso_shares {
        let share = to_f(*share);
        if share <= 0.0 || total <= 0.0 {
            continue;
        }
        let mut path = String::new();
        let samples = 64;
        let mut started = false;
        for i in 0..=samples {
            let log_c = xs.min_log + (xs.max_log - xs.min_log) * (i as f64) / (samples as f64);
            let c = 10f64.powf(log_c);
            let m = share * total / c;
            if m.log10() < ys.min_log || m.log10() > ys.max_log {
                continue;
            }
            let cmd = if started { 'L' } else { 'M' };
            path.push_str(&format!("{cmd}{},{} ", fmt(xs.project(c)), fmt(y_pix(m))));
            started = true;
        }
        if started {
            svg.push_str(&format!(
                "<path class=\"iso-share\" d=\"{}\" fill=\"none\" stroke=\"#888888\" \
                 stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
                path.trim_end()
            ));
            let label_c = 10f64.powf(xs.max_log - 0.35);
            let label_m = share * total / label_c;
            if label_m.log10() >= ys.min_log && label_m.log10() <= ys.max_log {
                svg.push_str(&format!(
                    "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" \
                     fill=\"#666666\">{}%</text>\n",
                    fmt(xs.project(label_c)),
                    fmt(y_pix(label_m) - 4.0),
                    fmt(share * 100.0)
                ));
            }
        }
    }

    // median cross-hairs
    let median_x = xs.project(to_f(analysis.median_consumption));
    let median_y = y_pix(to_f(analysis.median_intensity));
    svg.push_str(&format!(
        "<line class=\"median\" x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" \
         stroke=\"#2b6cb0\" stroke-width=\"1.5\"/>\n",
        x = fmt(median_x),
        y0 = fmt(margin_top),
        y1 = fmt(margin_top + plot_h)
    ));
    svg.push_str(&format!(
        "<line class=\"median\" x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" \
         stroke=\"#2b6cb0\" stroke-width=\"1.5\"/>\n",
        x0 = fmt(margin_left),
        x1 = fmt(margin_left + plot_w),
        y = fmt(median_y)
    ));

    // category points
    for datum in &analysis.data {
        let x = xs.project(to_f(datum.consumption_eur));
        let y = y_pix(to_f(datum.intensity));
        svg.push_str(&format!(
            "<circle class=\"category\" cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#c05621\" \
             fill-opacity=\"0.85\"/>\n",
            fmt(x),
            fmt(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            fmt(x + 7.0),
            fmt(y - 6.0),
            xml_escape(&datum.category)
        ));
    }

    // axis labels
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">Consumption (EUR)</text>\n",
        fmt(margin_left + plot_w / 2.0),
        fmt(height - 16.0)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        fmt(margin_top + plot_h / 2.0),
        fmt(margin_top + plot_h / 2.0),
        analysis.kind.intensity_label()
    ));
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::footprint::{BdeQuantity, CategoryFootprint};
    use crate::types::ByEcosystem;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn category(name: &str, consumption: f64, intensity: f64) -> CategoryFootprint<f64> {
        // bde chosen so bde / consumption = intensity
        let bde = intensity * consumption;
        CategoryFootprint {
            category: name.to_string(),
            consumption_eur: consumption,
            consumption_harmonized_eur: consumption,
            ecosystems: ByEcosystem::zero(),
            bde: BdeQuantity::new(bde),
            co2e_kg: 0.0,
            bde_intensity: Some(intensity),
            co2e_intensity: None,
        }
    }

    fn four_categories() -> Vec<CategoryFootprint<f64>> {
        vec![
            category("A", 100.0, 2.0),
            category("B", 200.0, 1.0),
            category("C", 300.0, 4.0),
            category("D", 400.0, 3.0),
        ]
    }

    #[test]
    fn medians_and_shares() {
        let analysis =
            quadrant_data(&four_categories(), FootprintKind::Biodiversity, &[0.05]).unwrap();
        assert!(close(analysis.median_consumption, 250.0, 1e-12));
        assert!(close(analysis.median_intensity, 2.5, 1e-12));
        assert!(close(analysis.total_footprint, 2800.0, 1e-9));
        let c = analysis.data.iter().find(|d| d.category == "C").unwrap();
        assert!(close(c.share, 1200.0 / 2800.0, 1e-12));
        assert_eq!(c.quadrant, Quadrant::UpperRight);

        // shares over all categories sum to one
        let share_sum: f64 = analysis.data.iter().map(|d| d.share).sum();
        assert!(close(share_sum, 1.0, 1e-12));
    }

    #[test]
    fn ties_go_lower_left() {
        let cats = vec![
            category("A", 100.0, 1.0),
            category("B", 100.0, 1.0),
            category("C", 100.0, 1.0),
        ];
        let analysis = quadrant_data(&cats, FootprintKind::Biodiversity, &[]).unwrap();
        for d in &analysis.data {
            assert_eq!(d.quadrant, Quadrant::LowerLeft);
        }
    }

    #[test]
    fn iso_share_curve_identity() {
        let analysis =
            quadrant_data(&four_categories(), FootprintKind::Biodiversity, &[0.05]).unwrap();
        // a point exactly on the 5% curve satisfies c * m = 0.05 * total
        let c = 250.0;
        let m = 0.05 * analysis.total_footprint / c;
        assert!(close(c * m, 0.05 * analysis.total_footprint, 1e-9));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(quadrant_data::<f64>(&[], FootprintKind::Biodiversity, &[]).is_err());
        // categories without consumption are skipped, so all-zero also fails
        let zero = vec![category("Z", 0.0, 0.0)];
        assert!(quadrant_data(&zero, FootprintKind::Biodiversity, &[]).is_err());
    }

    #[test]
    fn svg_structure_and_determinism() {
        let analysis = quadrant_data(
            &four_categories(),
            FootprintKind::Biodiversity,
            &[0.01, 0.05, 0.10],
        )
        .unwrap();
        let config = RenderConfig::default();
        let svg = render_quadrant(&analysis, &config);
        assert_eq!(svg.matches("<circle class=\"category\"").count(), 4);
        assert_eq!(svg.matches("class=\"median\"").count(), 2);
        assert!(svg.matches("class=\"iso-share\"").count() >= 1);
        let again = render_quadrant(&analysis, &config);
        assert_eq!(svg, again);
    }

    #[test]
    fn svg_without_iso_shares_has_no_dashed_curves() {
        let analysis =
            quadrant_data(&four_categories(), FootprintKind::Biodiversity, &[]).unwrap();
        let svg = render_quadrant(&analysis, &RenderConfig::default());
        assert_eq!(svg.matches("class=\"iso-share\"").count(), 0);
    }
}
