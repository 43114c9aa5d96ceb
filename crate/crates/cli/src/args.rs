//! Parsers for the compound flag values (`start:stop:count`, packets, complex numbers).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

/// `start:stop:count`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + k as f64 * step })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("expected start:stop:count, got '{s}'"));
        };
        let start: f64 = a.trim().parse().map_err(|_| format!("bad start '{a}'"))?;
        let stop: f64 = b.trim().parse().map_err(|_| format!("bad stop '{b}'"))?;
        let count: usize = n.trim().parse().map_err(|_| format!("bad count '{n}'"))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err("grid ends must be finite".into());
        }
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        if count > 1 && stop <= start {
            return Err(format!("grid needs stop > start when count > 1, got {start}:{stop}"));
        }
        if count == 1 && stop != start {
            return Err("a single-point grid needs start == stop".into());
        }
        Ok(Grid { start, stop, count })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// `gaussian:center:width[:scale]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Packet {
    pub center: f64,
    pub width: f64,
    pub scale: f64,
}

impl FromStr for Packet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.first() != Some(&"gaussian") || !(3..=4).contains(&parts.len()) {
            return Err(format!("expected gaussian:center:width[:scale], got '{s}'"));
        }
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number '{v}' in packet"));
        let center = num(parts[1])?;
        let width = num(parts[2])?;
        let scale = parts.get(3).map(|v| num(v)).transpose()?.unwrap_or(1.0);
        if !(width > 0.0) || !center.is_finite() || !scale.is_finite() {
            return Err("packet needs a finite centre and scale and a positive width".into());
        }
        Ok(Packet { center, width, scale })
    }
}

/// `re,im` or a bare real number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexArg {
    pub re: f64,
    pub im: f64,
}

impl ComplexArg {
    pub fn value(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl FromStr for ComplexArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (re, im) = match s.split_once(',') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "0"),
        };
        let re: f64 = re.parse().map_err(|_| format!("bad real part '{re}'"))?;
        let im: f64 = im.parse().map_err(|_| format!("bad imaginary part '{im}'"))?;
        if !re.is_finite() || !im.is_finite() {
            return Err("complex value must be finite".into());
        }
        Ok(ComplexArg { re, im })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!("0:0:1".parse::<Grid>().unwrap().points(), vec![0.0]);
        for bad in ["0:1", "1:0:3", "0:1:0", "a:1:3", "0:1:2:3", "0:1:1"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
        let last = "0.1:0.7:7".parse::<Grid>().unwrap().points();
        assert_eq!(*last.last().unwrap(), 0.7);
    }

    #[test]
    fn packet_and_complex_parsing() {
        let p: Packet = "gaussian:-1.5:0.5".parse().unwrap();
        assert_eq!((p.center, p.width, p.scale), (-1.5, 0.5, 1.0));
        assert_eq!("gaussian:0:1:2".parse::<Packet>().unwrap().scale, 2.0);
        assert!("lorentz:0:1".parse::<Packet>().is_err());
        assert!("gaussian:0:-1".parse::<Packet>().is_err());
        assert_eq!("0.5,-2".parse::<ComplexArg>().unwrap().value(), Complex64::new(0.5, -2.0));
        assert_eq!("3".parse::<ComplexArg>().unwrap().value(), Complex64::new(3.0, 0.0));
        assert!("x,1".parse::<ComplexArg>().is_err());
    }
}
