//! CSV and SVG renderings of a trajectory. Both are byte-deterministic.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::sim::Trajectory;

pub const CSV_HEADER: &str = "t,x,y,xdot,ydot,E,u,u2";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    X,
    Y,
    Xdot,
    Ydot,
    Energy,
    U,
    U2,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Xdot => "xdot",
            Channel::Ydot => "ydot",
            Channel::Energy => "E",
            Channel::U => "u",
            Channel::U2 => "u2",
        }
    }

    pub fn value(self, traj: &Trajectory, k: usize) -> f64 {
        match self {
            Channel::X => traj.x(k).unwrap_or(f64::NAN),
            Channel::Y => traj.y(k),
            Channel::Xdot => traj.xdot(k),
            Channel::Ydot => traj.ydot(k),
            Channel::Energy => traj.energy.as_ref().map_or(f64::NAN, |e| e[k]),
            Channel::U => traj.u[k],
            Channel::U2 => traj.u2[k],
        }
    }
}

impl FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        const ALL: [Channel; 7] = [
            Channel::X,
            Channel::Y,
            Channel::Xdot,
            Channel::Ydot,
            Channel::Energy,
            Channel::U,
            Channel::U2,
        ];
        ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            format!(
                "unknown channel `{s}` (expected one of {})",
                CSV_HEADER.replacen("t,", "", 1)
            )
        })
    }
}

/// Header plus one row per sample, 17 significant digits, LF endings.
pub fn csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(160 * (traj.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let cols = [
        Channel::X,
        Channel::Y,
        Channel::Xdot,
        Channel::Ydot,
        Channel::Energy,
        Channel::U,
        Channel::U2,
    ];
    for k in 0..traj.len() {
        let _ = write!(out, "{:.16e}", traj.times[k]);
        for c in cols {
            let _ = write!(out, ",{:.16e}", c.value(traj, k));
        }
        out.push('\n');
    }
    out
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 40.0;
const TICKS: usize = 5;
/// Polylines are thinned to at most this many vertices.
const MAX_VERTICES: usize = 2000;
const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

/// One polyline per channel against time, with axes and a legend.
pub fn svg(traj: &Trajectory, channels: &[Channel]) -> String {
    let (t0, t1) = match (traj.times.first(), traj.times.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a, a + 1.0),
        _ => (0.0, 1.0),
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &c in channels {
        for k in 0..traj.len() {
            let v = c.value(traj, k);
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if lo >= hi {
        let mid = if lo.is_finite() { lo } else { 0.0 };
        lo = mid - 1.0;
        hi = mid + 1.0;
    }
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |t: f64| LEFT + (t - t0) / (t1 - t0) * pw;
    let py = |v: f64| TOP + (hi - v) / (hi - lo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT},{TOP} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (t, v) = (t0 + f * (t1 - t0), lo + f * (hi - lo));
        let (x, y) = (px(t), py(v));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            TOP + ph,
            TOP + ph + 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            tick(t)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#,
            LEFT - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        LEFT + 0.5 * pw,
        HEIGHT - 6.0
    );

    let stride = traj.len().div_ceil(MAX_VERTICES).max(1);
    for (i, &c) in channels.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        let mut idx: Vec<usize> = (0..traj.len()).step_by(stride).collect();
        if idx.last().is_some_and(|&k| k + 1 < traj.len()) {
            idx.push(traj.len() - 1);
        }
        for k in idx {
            let v = c.value(traj, k);
            if v.is_finite() {
                let _ = write!(
                    pts,
                    "{}{:.2},{:.2}",
                    if pts.is_empty() { "" } else { " " },
                    px(traj.times[k]),
                    py(v)
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.2"/>"#
        );
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            c.name()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::States;

    fn three() -> Trajectory {
        Trajectory {
            h: 0.5,
            times: vec![0.0, 0.5, 1.0],
            states: States::Full(vec![
                [0.0, 0.1, 1.0, 0.0],
                [0.5, 0.1, 1.0, 0.0],
                [1.0, 0.1, 1.0, 0.0],
            ]),
            energy: None,
            u: vec![f64::NAN; 3],
            u2: vec![0.0; 3],
        }
    }

    #[test]
    fn csv_has_header_and_one_row_per_sample() {
        let text = csv(&three());
        let lines: Vec<&str> = text.split_terminator('\n').collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(!text.contains('\r'));
        assert_eq!(lines[2].split(',').next().unwrap(), "5.0000000000000000e-1");
        assert_eq!(lines[1].split(',').count(), 8);
    }

    #[test]
    fn csv_round_trips_values() {
        let mut t = three();
        t.times[1] = 0.1 + 0.2;
        let text = csv(&t);
        let back: f64 = text
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }

    #[test]
    fn svg_without_channels_draws_axes_only() {
        let s = svg(&three(), &[]);
        assert!(s.contains("<path"));
        assert!(!s.contains("<polyline"));
    }

    #[test]
    fn svg_is_deterministic() {
        let chans = [Channel::X, Channel::Y];
        let a = svg(&three(), &chans);
        assert_eq!(a, svg(&three(), &chans));
        assert_eq!(a.matches("<polyline").count(), 2);
        assert!(!a.contains(">xdot<") && a.contains(">x<"));
    }

    #[test]
    fn channel_names_parse() {
        for n in ["x", "y", "xdot", "ydot", "E", "u", "u2"] {
            assert_eq!(n.parse::<Channel>().unwrap().name(), n);
        }
        assert!("theta".parse::<Channel>().is_err());
    }
}
