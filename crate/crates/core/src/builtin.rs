//! Named maps, comparison functions and metrics.

use crate::certify::SelfMap;
use crate::comparison::ComparisonFunction;
use crate::error::{Error, Result};
use crate::expr::{parse, Arity, ParseError, ParseErrorKind};
use crate::format::fmt_real;
use crate::func::{RealFn, RealFn2};
use crate::space::{Distance, Domain};

pub const EX31_SOURCE: &str = "if(x < 0.5, x / 4, x / 5)";
pub const EX32_SOURCE: &str = "x - x * x";
pub const EX32PHI_SOURCE: &str = "if(x <= 0.5, x - x * x, 0.25)";

#[derive(Debug, Clone)]
pub enum Builtin {
    Map(SelfMap),
    Phi(ComparisonFunction),
    Metric(Distance),
}

/// Resolves a builtin name.
///
/// * `ex31`: `x/4` on `[0, 1/2)`, `x/5` on `[1/2, 1]`, domain `[0, 1]`
/// * `ex32`: `x - x^2` on `[0, 1/2]`
/// * `ex32phi`: `x - x^2` on `[0, 1/2]`, `1/4` above
/// * `linear(c)`: `c x`, `c` in `(0, 1)`
/// * `absdiff`: `|x - y|`
/// * `powdiff(p)`: `|x - y|^p`, `p >= 1`, suggested `s = 2^(p-1)`
pub fn builtin_lookup(name: &str) -> Result<Builtin> {
    let name = name.trim();
    let one = |src: &str| parse(src, Arity::One).expect("builtin source parses");
    match name {
        "ex31" => {
            let f = RealFn::new("ex31", |x| Ok(if x < 0.5 { x / 4.0 } else { x / 5.0 }))
                .with_expr(one(EX31_SOURCE));
            Ok(Builtin::Map(
                SelfMap::new(f, Domain::interval(0.0, 1.0)?).with_known_fixed_point(0.0),
            ))
        }
        "ex32" => {
            let f = RealFn::new("ex32", |x| Ok(x - x * x)).with_expr(one(EX32_SOURCE));
            Ok(Builtin::Map(
                SelfMap::new(f, Domain::interval(0.0, 0.5)?).with_known_fixed_point(0.0),
            ))
        }
        "ex32phi" => {
            let f = RealFn::new("ex32phi", |r| Ok(if r <= 0.5 { r - r * r } else { 0.25 }))
                .with_expr(one(EX32PHI_SOURCE));
            Ok(Builtin::Phi(ComparisonFunction::new(f)))
        }
        "absdiff" => {
            let f = RealFn2::new("absdiff", |x: f64, y: f64| Ok((x - y).abs()))
                .with_expr(parse("abs(x - y)", Arity::Two).expect("builtin source parses"));
            Ok(Builtin::Metric(Distance::new(f).with_suggested_s(1.0)))
        }
        _ => {
            if let Some(arg) = call_arg(name, "linear") {
                let c = number(name, arg)?;
                return Ok(Builtin::Phi(ComparisonFunction::linear(c)?));
            }
            if let Some(arg) = call_arg(name, "powdiff") {
                let p = number(name, arg)?;
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "powdiff(p) needs finite p >= 1, got {}",
                        fmt_real(p)
                    )));
                }
                let src = format!("pow(abs(x - y), {})", fmt_real(p));
                let f = RealFn2::new(
                    format!("powdiff({})", fmt_real(p)),
                    move |x: f64, y: f64| Ok((x - y).abs().powf(p)),
                )
                .with_expr(parse(&src, Arity::Two).expect("builtin source parses"));
                return Ok(Builtin::Metric(
                    Distance::new(f).with_suggested_s(2f64.powf(p - 1.0)),
                ));
            }
            Err(Error::UnknownBuiltin {
                name: name.to_string(),
            })
        }
    }
}

fn call_arg<'a>(name: &'a str, func: &str) -> Option<&'a str> {
    name.strip_prefix(func)?
        .trim_start()
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn number(name: &str, arg: &str) -> Result<f64> {
    arg.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidParameter(format!("`{name}`: `{arg}` is not a number")))
}

/// A self-map given as a builtin name or an expression in `x`.
///
/// Expression maps need an explicit domain; builtin maps fall back to their
/// own when `domain` is `None`.
pub fn resolve_map(spec: &str, domain: Option<Domain>) -> Result<SelfMap> {
    match builtin_lookup(spec) {
        Ok(Builtin::Map(m)) => Ok(match domain {
            Some(d) => m.with_domain(d),
            None => m,
        }),
        Ok(_) => Err(Error::InvalidParameter(format!("`{spec}` is not a map"))),
        Err(unknown @ Error::UnknownBuiltin { .. }) => {
            let func = or_unknown(RealFn::parse(spec), unknown)?;
            let domain = domain.ok_or_else(|| {
                Error::InvalidParameter(format!("map `{spec}` needs an explicit domain"))
            })?;
            Ok(SelfMap::new(func, domain))
        }
        Err(e) => Err(e),
    }
}

/// A comparison function given as a builtin or an expression in `x`.
pub fn resolve_phi(spec: &str) -> Result<ComparisonFunction> {
    match builtin_lookup(spec) {
        Ok(Builtin::Phi(p)) => Ok(p),
        Ok(_) => Err(Error::InvalidParameter(format!(
            "`{spec}` is not a comparison function"
        ))),
        Err(unknown @ Error::UnknownBuiltin { .. }) => Ok(ComparisonFunction::new(or_unknown(
            RealFn::parse(spec),
            unknown,
        )?)),
        Err(e) => Err(e),
    }
}

/// A distance given as a builtin or an expression in `x` and `y`.
pub fn resolve_metric(spec: &str) -> Result<Distance> {
    match builtin_lookup(spec) {
        Ok(Builtin::Metric(d)) => Ok(d),
        Ok(_) => Err(Error::InvalidParameter(format!("`{spec}` is not a metric"))),
        Err(unknown @ Error::UnknownBuiltin { .. }) => {
            Ok(Distance::new(or_unknown(RealFn2::parse(spec), unknown)?))
        }
        Err(e) => Err(e),
    }
}

// A spec that starts with an unknown name was most likely meant as a builtin.
fn or_unknown<T>(parsed: Result<T, ParseError>, unknown: Error) -> Result<T> {
    match parsed {
        Err(e) if e.offset == 1 && matches!(e.kind, ParseErrorKind::UnknownIdentifier(_)) => {
            Err(unknown)
        }
        other => Ok(other?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex31_matches_piecewise_definition() {
        let Builtin::Map(m) = builtin_lookup("ex31").unwrap() else {
            panic!()
        };
        assert_eq!(m.eval(1.0).unwrap(), 0.2);
        assert_eq!(m.eval(0.5).unwrap(), 0.1);
        assert_eq!(m.eval(0.4).unwrap(), 0.1);
        assert_eq!(m.domain(), &Domain::Interval { lo: 0.0, hi: 1.0 });
        assert_eq!(
            m.func().expr().unwrap(),
            &parse("if(x<0.5, x/4, x/5)", Arity::One).unwrap()
        );
    }

    #[test]
    fn ex32_on_half_interval() {
        let Builtin::Map(m) = builtin_lookup("ex32").unwrap() else {
            panic!()
        };
        assert_eq!(m.domain(), &Domain::Interval { lo: 0.0, hi: 0.5 });
        assert_eq!(m.eval(0.5).unwrap(), 0.25);
    }

    #[test]
    fn parameterized_builtins() {
        let Builtin::Metric(d) = builtin_lookup("powdiff(3)").unwrap() else {
            panic!()
        };
        assert_eq!(d.suggested_s(), Some(4.0));
        assert_eq!(d.eval(0.0, 2.0).unwrap(), 8.0);
        assert!(builtin_lookup("powdiff(0.5)").is_err());
        assert!(builtin_lookup("linear(1.0)").is_err());
        assert!(builtin_lookup("linear(abc)").is_err());
        assert!(matches!(
            builtin_lookup("linear( 0.5 )"),
            Ok(Builtin::Phi(_))
        ));
    }

    #[test]
    fn unknown_builtin_lists_names() {
        let msg = builtin_lookup("nope").unwrap_err().to_string();
        assert!(msg.contains("ex31") && msg.contains("powdiff(p)"), "{msg}");
    }

    #[test]
    fn resolution_falls_back_to_expressions() {
        let d = Domain::interval(0.0, 1.0).unwrap();
        let m = resolve_map("x/2", Some(d)).unwrap();
        assert_eq!(m.eval(1.0).unwrap(), 0.5);
        assert!(resolve_map("x/2", None).is_err());
        assert!(resolve_map("ex32phi", None).is_err());
        assert_eq!(resolve_phi("x/3").unwrap().eval(3.0).unwrap(), 1.0);
        assert_eq!(
            resolve_metric("(x-y)^2").unwrap().eval(0.0, 3.0).unwrap(),
            9.0
        );
        assert!(resolve_metric("nope").is_err());
    }
}
