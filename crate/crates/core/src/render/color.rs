use std::fmt;
use std::str::FromStr;

use super::RenderError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

/// Fill for cells without a value.
pub const MISSING_COLOR: Rgb = Rgb(128, 128, 128);

/// Population a color scale's extremes are taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scope {
    /// One axial level of one assembly.
    #[default]
    SelectedLevel,
    /// Every level of one assembly.
    WholeAssembly,
    /// Every level of every assembly in the reactor.
    AllAssemblies,
}

impl Scope {
    pub const ALL: [Scope; 3] = [Scope::SelectedLevel, Scope::WholeAssembly, Scope::AllAssemblies];

    pub fn as_str(self) -> &'static str {
        match self {
            Scope::SelectedLevel => "selected_level",
            Scope::WholeAssembly => "whole_assembly",
            Scope::AllAssemblies => "all_assemblies",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scope {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, RenderError> {
        Scope::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| RenderError::InvalidArgument(format!("unknown normalization scope {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorScale {
    pub min: f64,
    pub max: f64,
    pub scope: Scope,
}

impl ColorScale {
    pub fn new(min: f64, max: f64, scope: Scope) -> Result<Self, RenderError> {
        if !min.is_finite() || !max.is_finite() || min > max {
            return Err(RenderError::InvalidArgument(format!("invalid color scale [{min}, {max}]")));
        }
        Ok(Self { min, max, scope })
    }

    /// Scale spanning the finite values of `values`; `[0, 0]` when there are
    /// none.
    pub fn spanning(values: impl IntoIterator<Item = f64>, scope: Scope) -> Self {
        let (min, max) = values
            .into_iter()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if min > max {
            Self { min: 0.0, max: 0.0, scope }
        } else {
            Self { min, max, scope }
        }
    }

    /// Position of `value` on the scale, clamped to `[0, 1]`; `0.5` for a
    /// degenerate scale.
    pub fn position(&self, value: f64) -> f64 {
        if self.max == self.min {
            0.5
        } else {
            ((value - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
        }
    }
}

/// Blue (low) to red (high) through green: hue `240 * (1 - t)` at full
/// saturation and half lightness. NaN maps to [`MISSING_COLOR`].
pub fn color_for(value: f64, scale: &ColorScale) -> Rgb {
    if value.is_nan() {
        return MISSING_COLOR;
    }
    hsl_to_rgb(240.0 * (1.0 - scale.position(value)), 1.0, 0.5)
}

pub(crate) fn hsl_to_rgb(hue: f64, s: f64, l: f64) -> Rgb {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let h = hue.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let to_u8 = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    Rgb(to_u8(r), to_u8(g), to_u8(b))
}
