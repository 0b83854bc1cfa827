//! Measure CSV: `# atom <x> <mass>` comment lines, then `x,density` rows
//! across the support at a fixed step.

use std::fmt::Write as _;

use qrpat_core::measures::MeasureSpec;

/// Density rows use cell averages, so arcsine endpoints stay finite.
pub fn render_measure(m: &MeasureSpec, step: f64) -> String {
    let mut out = String::new();
    for a in &m.atoms {
        let _ = writeln!(out, "# atom {} {}", a.x, a.mass);
    }
    let (lo, hi) = m.support();
    let _ = writeln!(out, "# support {lo} {hi}");
    out.push_str("x,density\n");
    if hi > lo {
        let n = ((hi - lo) / step).round() as usize;
        for i in 0..=n {
            let x = if i == n { hi } else { lo + i as f64 * step };
            let _ = writeln!(out, "{x},{}", m.cell_density(x, step));
        }
    }
    out
}
