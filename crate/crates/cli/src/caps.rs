use loopforge::finite_loop::{DEVIATION_ORDER_CAP, DEVIATION_WEIGHT_CAP, LINEAR_ORDER_CAP};

/// Parameter limits. Raised through `LOOPFORGE_CAPS="key=value,..."`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Truncation order of the series model.
    pub order: u32,
    pub p: usize,
    pub q: usize,
    /// Bracket weight for the enumeration suites.
    pub weight: usize,
    /// Loop order when deviations are enumerated.
    pub loop_order: usize,
    /// Largest γ index computed with deviations.
    pub index: usize,
    /// Loop order for the loop-algebra linear algebra.
    pub linear_order: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            order: 8,
            p: 3,
            q: 4,
            weight: 5,
            loop_order: DEVIATION_ORDER_CAP,
            index: DEVIATION_WEIGHT_CAP,
            linear_order: LINEAR_ORDER_CAP,
        }
    }
}

impl Caps {
    pub fn parse(spec: &str) -> Result<Caps, String> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| format!("bad cap {item:?}, expected key=value"))?;
            let v: usize = value.trim().parse().map_err(|_| format!("bad value in cap {item:?}"))?;
            match key.trim() {
                "order" => caps.order = u32::try_from(v).map_err(|_| format!("order {v} too large"))?,
                "p" => caps.p = v,
                "q" => caps.q = v,
                "weight" => caps.weight = v,
                "loop_order" => caps.loop_order = v,
                "index" => caps.index = v,
                "linear_order" => caps.linear_order = v,
                other => return Err(format!("unknown cap {other:?}")),
            }
        }
        Ok(caps)
    }

    pub fn from_env() -> Result<Caps, String> {
        match std::env::var("LOOPFORGE_CAPS") {
            Ok(s) => Caps::parse(&s),
            Err(_) => Ok(Caps::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_caps() {
        assert_eq!(Caps::parse("").unwrap(), Caps::default());
        let c = Caps::parse("p=4, weight=6").unwrap();
        assert_eq!((c.p, c.weight, c.q), (4, 6, 4));
        assert!(Caps::parse("p").is_err());
        assert!(Caps::parse("z=1").is_err());
        assert!(Caps::parse("p=x").is_err());
    }
}
