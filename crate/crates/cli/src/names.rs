//! Textual names for families, classes, ranges and constructions.

use std::path::Path;

use anyhow::{bail, Context, Result};
use hyperstab::constructions::{self, NamedConstruction};
use hyperstab::io::read_graph;
use hyperstab::rational::{factorial, parse_rational, pow_int, ratio};
use hyperstab::stability::{chromatic_number, ClassSpec};
use hyperstab::{FamilySpec, RGraph};
use num_rational::BigRational;

/// A parsed family together with its reference Turán density, when known.
#[derive(Clone, Debug)]
pub struct Family {
    pub spec: FamilySpec,
    pub pi: Option<BigRational>,
}

fn num(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| hyperstab::Error::Parse(format!("bad {what} `{s}`")).into())
}

/// π of a family of graphs from Erdős–Stone–Simonovits: 1 − 1/(χ − 1).
fn graph_density(members: &[RGraph]) -> Result<Option<BigRational>> {
    let chi = members.iter().map(chromatic_number).collect::<hyperstab::Result<Vec<_>>>()?.into_iter().min();
    Ok(chi.map(|c| if c <= 2 { ratio(0, 1) } else { ratio(1, 1) - ratio(1, c as i64 - 1) }))
}

fn sigma_density(r: usize) -> BigRational {
    BigRational::from(factorial(r)) / pow_int(r, r)
}

/// `k<l>`, `c<l>`, `sigma[:r]`, `cancellative[:r]`, `single:F.hgr`,
/// `list:DIR`, `weakexp:F.hgr[:order]`.
pub fn parse_family(s: &str) -> Result<Family> {
    let (head, rest) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
    let family = match head {
        "sigma" | "cancellative" => {
            let r = rest.map_or(Ok(3), |x| num(x, "uniformity"))?;
            if r < 2 {
                bail!(hyperstab::Error::Parse(format!("uniformity {r} too small")));
            }
            let spec = if head == "sigma" { FamilySpec::Sigma(r) } else { FamilySpec::Cancellative(r) };
            // the cancellative densities are known for r = 3, 4
            let pi = (head == "sigma" || r <= 4).then(|| sigma_density(r));
            Family { spec, pi }
        }
        "single" => {
            let g = read_graph(Path::new(rest.ok_or_else(|| hyperstab::Error::Parse("single: needs a file".into()))?))?;
            let pi = if g.r() == 2 { graph_density(std::slice::from_ref(&g))? } else { None };
            Family { spec: FamilySpec::Single(g), pi }
        }
        "list" => {
            let dir = rest.ok_or_else(|| hyperstab::Error::Parse("list: needs a directory".into()))?;
            let mut paths: Vec<_> = std::fs::read_dir(dir)
                .with_context(|| format!("reading {dir}"))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "hgr" || x == "json"))
                .collect();
            paths.sort();
            let members = paths.iter().map(|p| read_graph(p)).collect::<hyperstab::Result<Vec<_>>>()?;
            let pi = if members.first().is_some_and(|g| g.r() == 2) { graph_density(&members)? } else { None };
            Family { spec: FamilySpec::list(members)?, pi }
        }
        "weakexp" => {
            let rest = rest.ok_or_else(|| hyperstab::Error::Parse("weakexp: needs a file".into()))?;
            let (path, order) = match rest.rsplit_once(':') {
                Some((p, o)) if o.chars().all(|c| c.is_ascii_digit()) => (p, Some(num(o, "order")?)),
                _ => (rest, None),
            };
            let base = read_graph(Path::new(path))?;
            let order = order.unwrap_or(base.n());
            Family { spec: FamilySpec::weak_expansion(base, order)?, pi: None }
        }
        _ if head.len() > 1 && (head.starts_with('k') || head.starts_with('c')) && rest.is_none() => {
            let l = num(&head[1..], "order")?;
            let g = if head.starts_with('k') { constructions::complete(l, 2)? } else { constructions::cycle(l)? };
            let pi = graph_density(std::slice::from_ref(&g))?;
            Family { spec: FamilySpec::Single(g), pi }
        }
        _ => bail!(hyperstab::Error::Parse(format!("unknown family `{s}`"))),
    };
    Ok(family)
}

/// `bipartite`, `krl:r:l`, `semibip:r`, `tcs:r:p`.
pub fn parse_class(s: &str) -> Result<ClassSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    let class = match parts.as_slice() {
        ["bipartite"] => ClassSpec::krl(2, 2)?,
        ["krl", r, l] => ClassSpec::krl(num(r, "uniformity")?, num(l, "class count")?)?,
        ["semibip", r] => ClassSpec::semibipartite(num(r, "uniformity")?)?,
        ["tcs", r, p] => ClassSpec::two_covered(num(r, "uniformity")?, num(p, "pattern size")?)?,
        _ => bail!(hyperstab::Error::Parse(format!("unknown class `{s}`"))),
    };
    Ok(class)
}

/// `A..B` (inclusive) or a single `N`.
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a, "range start")?, num(b.trim_start_matches('='), "range end")?),
        None => {
            let n = num(s, "size")?;
            (n, n)
        }
    };
    if a > b {
        bail!(hyperstab::Error::Parse(format!("empty range `{s}`")));
    }
    Ok((a, b))
}

pub fn parse_q(s: &str) -> Result<BigRational> {
    Ok(parse_rational(s)?)
}

/// `turan:n:l`, `turanr:n:l:r`, `complete:l:r`, `gentri:r`, `empty-expansion:r:l`,
/// `bgraph:r:l1`, `matching:r:t`, `sunflower:r:t`, `semibip:a:b:r`, `turanplus:n:l`, `cycle:n`.
pub fn parse_construction(s: &str) -> Result<NamedConstruction> {
    let parts: Vec<&str> = s.split(':').collect();
    let args: Vec<usize> = parts[1..].iter().map(|x| num(x, "parameter")).collect::<Result<_>>()?;
    use NamedConstruction as C;
    let c = match (parts[0], args.as_slice()) {
        ("turan", &[n, l]) => C::TuranGraph { n, l },
        ("turanr", &[n, l, r]) => C::TuranRGraph { n, l, r },
        ("complete", &[l, r]) => C::CompleteR { l, r },
        ("gentri", &[r]) => C::GenTriangle { r },
        ("empty-expansion", &[r, l]) => C::EmptyExpansion { r, l },
        ("bgraph", &[r, l1]) => C::BGraph { r, l1 },
        ("matching", &[r, t]) => C::Matching { r, t },
        ("sunflower", &[r, t]) => C::Sunflower { r, t },
        ("semibip", &[a, b, r]) => C::CompleteSemibipartite { a, b, r },
        ("turanplus", &[n, l]) => C::TuranPlus { n, l },
        ("cycle", &[n]) => C::Cycle { n },
        _ => bail!(hyperstab::Error::Parse(format!("unknown construction `{s}`"))),
    };
    Ok(c)
}
