use std::str::FromStr;

use ionsurgery_core::quantum::{stephenson_pair, BellDiagonalState, DensityMatrix};

/// `9`, `3,5,7` or an inclusive range `3..9`.
pub fn int_list<T: TryFrom<u64>>(text: &str) -> Result<Vec<T>, String> {
    let text = text.trim();
    let values: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let a: u64 = parse_one(a)?;
        let b: u64 = parse_one(b.trim_start_matches('='))?;
        if a > b {
            return Err(format!("empty range {text:?}"));
        }
        (a..=b).collect()
    } else {
        text.split(',').map(parse_one).collect::<Result<_, _>>()?
    };
    values
        .into_iter()
        .map(|v| T::try_from(v).map_err(|_| format!("{v} is out of range")))
        .collect()
}

pub fn float_list(text: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = text.split(',').map(parse_one).collect::<Result<_, _>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(format!("non-finite value in {text:?}"));
    }
    Ok(v)
}

fn parse_one<T: FromStr>(s: &str) -> Result<T, String> {
    let s = s.trim();
    s.parse().map_err(|_| format!("cannot parse {s:?}"))
}

/// `stephenson`, `werner:F` or `belldiag:F,px,pz,py`.
pub fn input_state(text: &str) -> Result<(DensityMatrix, BellOrStephenson), String> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    match kind {
        "stephenson" if rest.is_empty() => {
            Ok((stephenson_pair(true), BellOrStephenson::Stephenson))
        }
        "werner" => {
            let f: f64 = parse_one(rest)?;
            let b = BellDiagonalState::werner(f).map_err(|e| e.to_string())?;
            Ok((b.to_density(), BellOrStephenson::Bell(b)))
        }
        "belldiag" => {
            let v = float_list(rest)?;
            let [f, px, pz, py] = v[..] else {
                return Err(format!("belldiag needs F,px,pz,py; got {rest:?}"));
            };
            let b = BellDiagonalState::new(f, px, pz, py).map_err(|e| e.to_string())?;
            Ok((b.to_density(), BellOrStephenson::Bell(b)))
        }
        _ => Err(format!(
            "unknown input {text:?}; expected stephenson, werner:F or belldiag:F,px,pz,py"
        )),
    }
}

pub enum BellOrStephenson {
    Bell(BellDiagonalState),
    Stephenson,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(int_list::<u32>("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(int_list::<u32>("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(int_list::<u64>("100, 1000").unwrap(), vec![100, 1000]);
        assert!(int_list::<u32>("9..3").is_err());
        assert!(int_list::<u32>("x").is_err());
        assert_eq!(float_list("1000,10").unwrap(), vec![1000.0, 10.0]);
    }

    #[test]
    fn input_specs() {
        assert!(input_state("stephenson").is_ok());
        assert!(input_state("werner:0.94").is_ok());
        assert!(input_state("belldiag:0.9,0.5,0.25,0.25").is_ok());
        assert!(input_state("belldiag:0.9,0.5").is_err());
        assert!(input_state("werner:1.5").is_err());
        assert!(input_state("ghz").is_err());
    }
}
