use std::str::FromStr;

use super::{BsElement, Family, GroupDescriptor, GroupElement, LampElement};
use crate::error::{usage, Result};

fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .or_else(|_| usage(format!("cannot read {what} from {s:?}")))
}

fn keyed<'a>(part: &'a str, key: &str) -> Result<&'a str> {
    match part.split_once('=') {
        Some((k, v)) if k.trim() == key => Ok(v),
        _ => usage(format!("expected `{key}=...`, found {part:?}")),
    }
}

impl Family {
    /// Parses `zn:N`, `heis`, `ll:M` or `bs:K`.
    pub fn parse(s: &str) -> Result<Family> {
        let s = s.trim();
        let fam = match s.split_once(':') {
            None if s == "heis" => Family::Heisenberg,
            Some(("zn", n)) => Family::Zn(num(n, "dimension")?),
            Some(("ll", m)) => Family::Lamplighter(num(m, "lamp order")?),
            Some(("bs", k)) => Family::BaumslagSolitar(num(k, "BS parameter")?),
            _ => return usage(format!("unknown group {s:?}; expected zn:N, heis, ll:M or bs:K")),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn name(&self) -> String {
        match self {
            Family::Zn(n) => format!("zn:{n}"),
            Family::Heisenberg => "heis".into(),
            Family::Lamplighter(m) => format!("ll:{m}"),
            Family::BaumslagSolitar(k) => format!("bs:{k}"),
        }
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        match g {
            GroupElement::Zn(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("zn:{}", parts.join(","))
            }
            GroupElement::Heis([x, y, z]) => format!("heis:{x},{y},{z}"),
            GroupElement::Lamp(l) => {
                let m = match self {
                    Family::Lamplighter(m) => *m,
                    _ => 0,
                };
                let lamps: Vec<String> = l.lamps().iter().map(|(p, v)| format!("{p}:{v}")).collect();
                format!("ll:m={m};lamps={};pos={}", lamps.join(","), l.cursor())
            }
            GroupElement::Bs(b) => format!("bs:a={},s={},n={}", b.numerator(), b.scale(), b.shift()),
        }
    }

    /// Strict parser for the canonical element syntax of this family.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let (tag, body) = s
            .split_once(':')
            .map_or_else(|| usage(format!("element {s:?} lacks a family tag")), Ok)?;
        let g = match (self, tag) {
            (Family::Zn(n), "zn") => {
                let v: Vec<i128> = body
                    .split(',')
                    .map(|c| num(c, "coordinate"))
                    .collect::<Result<_>>()?;
                if v.len() != *n {
                    return usage(format!("expected {n} coordinates, found {}", v.len()));
                }
                GroupElement::Zn(v)
            }
            (Family::Heisenberg, "heis") => {
                let v: Vec<i128> = body
                    .split(',')
                    .map(|c| num(c, "coordinate"))
                    .collect::<Result<_>>()?;
                match v[..] {
                    [x, y, z] => GroupElement::Heis([x, y, z]),
                    _ => return usage("Heisenberg elements have three coordinates"),
                }
            }
            (Family::Lamplighter(m), "ll") => {
                let parts: Vec<&str> = body.split(';').collect();
                if parts.len() != 3 {
                    return usage("lamplighter syntax is ll:m=M;lamps=p:v,...;pos=N");
                }
                let given_m: u32 = num(keyed(parts[0], "m")?, "lamp order")?;
                if given_m != *m {
                    return usage(format!("element has m={given_m} but the group has m={m}"));
                }
                let lamp_text = keyed(parts[1], "lamps")?.trim();
                let mut lamps = Vec::new();
                if !lamp_text.is_empty() {
                    for entry in lamp_text.split(',') {
                        let (p, v) = entry
                            .split_once(':')
                            .map_or_else(|| usage(format!("lamp entry {entry:?} is not p:v")), Ok)?;
                        let p: i64 = num(p, "lamp position")?;
                        let v: u32 = num(v, "lamp value")?;
                        if v == 0 || v >= *m {
                            return usage(format!("lamp value {v} outside 1..{m}"));
                        }
                        if lamps.last().is_some_and(|&(q, _)| q >= p) {
                            return usage("lamp positions must be strictly increasing");
                        }
                        lamps.push((p, v));
                    }
                }
                let pos: i64 = num(keyed(parts[2], "pos")?, "cursor")?;
                GroupElement::Lamp(LampElement::from_sorted(lamps, pos))
            }
            (Family::BaumslagSolitar(k), "bs") => {
                let parts: Vec<&str> = body.split(',').collect();
                if parts.len() != 3 {
                    return usage("BS syntax is bs:a=A,s=S,n=N");
                }
                let a: i128 = num(keyed(parts[0], "a")?, "numerator")?;
                let sc: u32 = num(keyed(parts[1], "s")?, "scale")?;
                let n: i64 = num(keyed(parts[2], "n")?, "shift")?;
                GroupElement::Bs(BsElement::new(*k, a, sc, n))
            }
            _ => return usage(format!("element {s:?} does not belong to {}", self.name())),
        };
        Ok(g)
    }
}

impl GroupDescriptor {
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        self.family().parse_element(s)
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        self.family().format_element(g)
    }
}
