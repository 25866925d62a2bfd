use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use cubecheck::arith::Rational;
use cubecheck::brauer::{
    evaluation_image_witnessed, inv_cubic, inv_quaternion, BrauerClassId, LocalPoint, Place,
};
use cubecheck::obstruction::{certify, reproduce, ProblemInstance};
use cubecheck::padic::{self, local_solvable, Equation, LocalWitness, PadicApprox};
use cubecheck::search::{search_box, CongruenceFilter};
use cubecheck::Error;

/// Verification toolkit for the integral Brauer–Manin analysis of
/// x³+y³+z³ = a and x³+y³+2z³ = a.
#[derive(Parser)]
#[command(name = "cubecheck", version)]
struct Cli {
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide local solvability of the equation over Z_p.
    Local {
        #[arg(long, value_parser = parse_eq)]
        eq: Equation,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_bigint)]
        a: BigInt,
        #[arg(long)]
        p: u64,
    },
    /// Enumerate integer solutions in a box, under congruence filters.
    Search {
        #[arg(long, value_parser = parse_eq)]
        eq: Equation,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_bigint)]
        a: BigInt,
        #[arg(long)]
        bound: i64,
        /// A condition "form=res%mod", e.g. "x+y=2%8"; repeatable.
        #[arg(long = "filter", value_parser = parse_filter)]
        filters: Vec<CongruenceFilter>,
    },
    /// Evaluate the local invariant of a Brauer class at a point.
    Eval {
        /// One of A, Aprime, Bprime, Example1.
        #[arg(long)]
        class: String,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_bigint, default_value = "1")]
        a: BigInt,
        /// Comma-separated rational coordinates, e.g. "-1/15,-17/15,6/5".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// A prime, or "infinity".
        #[arg(long)]
        place: String,
    },
    /// Compute the exact image of the joint evaluation map at a prime.
    Image {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_bigint)]
        a: BigInt,
        #[arg(long)]
        p: u64,
        /// Comma-separated class names, e.g. "Aprime,Bprime".
        #[arg(long)]
        classes: String,
    },
    /// Build and verify a no-obstruction certificate.
    Certify {
        #[arg(long, value_parser = parse_eq)]
        eq: Equation,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_bigint)]
        a: BigInt,
        /// Write the certificate JSON here instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Re-run a named scripted verification.
    Reproduce { name: String },
    /// Verify the built-in polynomial identities.
    Identities,
}

fn parse_eq(s: &str) -> Result<Equation, String> {
    match s {
        "three-cubes" | "three_cubes" => Ok(Equation::ThreeCubes),
        "twisted" => Ok(Equation::Twisted),
        _ => Err(format!("unknown equation {s}; pick three-cubes or twisted")),
    }
}

fn parse_bigint(s: &str) -> Result<BigInt, String> {
    s.parse().map_err(|_| format!("{s} is not an integer"))
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| format!("bad numerator in {s}"))?;
    let d: BigInt = den.parse().map_err(|_| format!("bad denominator in {s}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {s}"));
    }
    Ok(Rational::new(n, d))
}

fn parse_point(s: &str) -> Result<[Rational; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("point {s} must have three comma-separated coordinates"));
    }
    Ok([
        parse_rational(parts[0])?,
        parse_rational(parts[1])?,
        parse_rational(parts[2])?,
    ])
}

/// "form=res%mod" with form a signed combination of x, y, z, e.g. "x+y" or
/// "2x-3z".
fn parse_filter(s: &str) -> Result<CongruenceFilter, String> {
    let (form, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("filter {s} lacks '='"))?;
    let (res, modulus) = rest
        .split_once('%')
        .ok_or_else(|| format!("filter {s} lacks '%'"))?;
    let residue: i64 = res.trim().parse().map_err(|_| format!("bad residue in {s}"))?;
    let modulus: i64 = modulus.trim().parse().map_err(|_| format!("bad modulus in {s}"))?;
    let mut coeffs = [0i64; 3];
    let mut sign = 1i64;
    let mut digits = String::new();
    let mut saw_term = false;
    for ch in form.chars() {
        match ch {
            ' ' => {}
            '+' | '-' => {
                if !digits.is_empty() {
                    return Err(format!("dangling coefficient in filter {s}"));
                }
                sign = if ch == '-' { -sign } else { sign };
            }
            '0'..='9' => digits.push(ch),
            'x' | 'y' | 'z' => {
                let c: i64 = if digits.is_empty() {
                    1
                } else {
                    digits.parse().map_err(|_| format!("bad coefficient in {s}"))?
                };
                let i = match ch {
                    'x' => 0,
                    'y' => 1,
                    _ => 2,
                };
                coeffs[i] += sign * c;
                sign = 1;
                digits.clear();
                saw_term = true;
            }
            _ => return Err(format!("unexpected character {ch} in filter {s}")),
        }
    }
    if !digits.is_empty() || !saw_term {
        return Err(format!("filter form {form} must be a combination of x, y, z"));
    }
    CongruenceFilter::new(coeffs, residue, modulus).map_err(|e| e.to_string())
}

fn parse_place(s: &str) -> Result<Place, Error> {
    match s {
        "infinity" | "inf" | "real" => Ok(Place::Real),
        _ => {
            let p: u64 = s
                .parse()
                .map_err(|_| Error::Usage(format!("{s} is not a prime or 'infinity'")))?;
            Place::finite(p).map_err(|_| Error::Usage(format!("{p} is not prime")))
        }
    }
}

fn parse_class(name: &str, a: &BigInt) -> Result<BrauerClassId, Error> {
    match name {
        "A" => Ok(BrauerClassId::A(a.clone())),
        "Aprime" | "A'" => Ok(BrauerClassId::Aprime(a.clone())),
        "Bprime" | "B'" => Ok(BrauerClassId::Bprime(a.clone())),
        "Example1" | "example1" => Ok(BrauerClassId::Example1),
        _ => Err(Error::Usage(format!(
            "unknown class {name}; pick A, Aprime, Bprime, or Example1"
        ))),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Local { eq, a, p } => {
            let w = local_solvable(&eq, &a, p)?;
            match &w {
                LocalWitness::Point { residue, level, newton_index, .. } => {
                    if cli.json {
                        println!(
                            "{}",
                            json!({
                                "equation": eq, "a": a.to_string(), "p": p,
                                "solvable": true,
                                "residue": residue.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                                "level": level, "newton_index": newton_index,
                            })
                        );
                    } else {
                        println!(
                            "{eq} = {a} is solvable over Z_{p}: residue ({}, {}, {}) mod {p}^{level}, Newton coordinate {newton_index}",
                            residue[0], residue[1], residue[2]
                        );
                    }
                    Ok(0)
                }
                LocalWitness::Empty { level, .. } => {
                    if cli.json {
                        println!(
                            "{}",
                            json!({
                                "equation": eq, "a": a.to_string(), "p": p,
                                "solvable": false, "level": level,
                            })
                        );
                    } else {
                        println!("{eq} = {a} has no Z_{p} solution (residues die at {p}^{level})");
                    }
                    Ok(1)
                }
            }
        }
        Cmd::Search { eq, a, bound, filters } => {
            let sols = search_box(&eq, &a, bound, &filters)?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "equation": eq, "a": a.to_string(), "bound": bound,
                        "solutions": sols,
                    })
                );
            } else {
                println!("{} solution(s) of {eq} = {a} with |x|,|y|,|z| ≤ {bound}:", sols.len());
                for s in &sols {
                    println!("  ({}, {}, {})", s[0], s[1], s[2]);
                }
            }
            Ok(0)
        }
        Cmd::Eval { class, a, point, place } => {
            let cls = parse_class(&class, &a)?;
            let m = parse_point(&point).map_err(Error::Usage)?;
            let v = parse_place(&place)?;
            let inv = if cls.is_cubic() {
                let Place::Finite(p) = v else {
                    return Err(Error::Usage("cubic classes evaluate at finite places".into()));
                };
                let prec = padic::default_precision();
                let coords = [
                    PadicApprox::from_rational(&m[0], p, prec)?,
                    PadicApprox::from_rational(&m[1], p, prec)?,
                    PadicApprox::from_rational(&m[2], p, prec)?,
                ];
                inv_cubic(&cls, p, &coords)?
            } else {
                inv_quaternion(&cls, &LocalPoint::Rational(m), &v)?
            };
            if cli.json {
                let (n, d) = inv.as_pair();
                println!(
                    "{}",
                    json!({
                        "class": class, "a": a.to_string(), "point": point,
                        "place": place, "invariant": [n, d],
                    })
                );
            } else {
                println!("inv_{place} {class} = {inv}");
            }
            Ok(0)
        }
        Cmd::Image { a, p, classes } => {
            let parsed: Vec<BrauerClassId> = classes
                .split(',')
                .map(|n| parse_class(n.trim(), &a))
                .collect::<Result<_, _>>()?;
            let rows = evaluation_image_witnessed(&parsed, &a, p)?;
            if cli.json {
                let jrows: Vec<_> = rows
                    .iter()
                    .map(|r| {
                        let flat: Vec<u8> =
                            r.values.iter().flat_map(|v| { let (n, d) = v.as_pair(); [n, d] }).collect();
                        json!({
                            "values": flat,
                            "witness": r.witness.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                            "modulus": r.modulus.to_string(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    json!({ "a": a.to_string(), "p": p, "classes": classes, "image": jrows })
                );
            } else {
                println!("image of ({classes}) at p = {p}, a = {a}: {} value(s)", rows.len());
                for r in &rows {
                    let vals: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
                    println!(
                        "  ({})  from ({}, {}, {}) mod {}",
                        vals.join(", "),
                        r.witness[0],
                        r.witness[1],
                        r.witness[2],
                        r.modulus
                    );
                }
            }
            Ok(0)
        }
        Cmd::Certify { eq, a, out } => {
            if a == BigInt::from(0) {
                return Err(Error::Usage("a must be nonzero".into()));
            }
            let cert = certify(&ProblemInstance::new(eq, a));
            cert.verify()?;
            let s = cert.to_json_string();
            match out {
                Some(path) => {
                    std::fs::File::create(&path)
                        .and_then(|mut f| f.write_all(s.as_bytes()))
                        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
                    if !cli.json {
                        println!(
                            "certificate ({}) written to {}",
                            cert.outcome.tag(),
                            path.display()
                        );
                    }
                }
                None => print!("{s}"),
            }
            Ok(0)
        }
        Cmd::Reproduce { name } => {
            let r = reproduce(&name)?;
            if cli.json {
                println!("{}", r.to_json());
            } else {
                println!("reproduction {}:", r.name);
                for line in &r.lines {
                    println!("  {line}");
                }
                println!("{}", if r.pass { "PASS" } else { "FAIL" });
            }
            Ok(if r.pass { 0 } else { 1 })
        }
        Cmd::Identities => {
            let r = reproduce("identities")?;
            if cli.json {
                println!("{}", r.to_json());
            } else {
                for line in &r.lines {
                    println!("{line}");
                }
            }
            Ok(if r.pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Error::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
