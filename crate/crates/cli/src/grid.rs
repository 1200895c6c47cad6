//! Grid flags: `5,10,15`, `lin:START:STOP:COUNT` or `log:START:STOP:COUNT`.

use crate::CliError;

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::schema(format!("bad grid '{spec}': {why}"));
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    if let Some((kind, rest)) = spec.split_once(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad("expected KIND:START:STOP:COUNT"));
        };
        let (start, stop) = (parse(start)?, parse(stop)?);
        let count: usize = count.trim().parse().map_err(|_| bad("count must be an integer"))?;
        let at = |k: usize| if count == 1 { 0.0 } else { k as f64 / (count - 1) as f64 };
        return match kind {
            "lin" => Ok((0..count).map(|k| start + (stop - start) * at(k)).collect()),
            "log" if start > 0.0 && stop > 0.0 => {
                let (l0, l1) = (start.log10(), stop.log10());
                Ok((0..count).map(|k| 10f64.powf(l0 + (l1 - l0) * at(k))).collect())
            }
            "log" => Err(bad("log grid bounds must be > 0")),
            _ => Err(bad("unknown grid kind")),
        };
    }
    spec.split(',').map(parse).collect()
}
