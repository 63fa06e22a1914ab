//! Problem files: variable declarations, equations, metrics and operator
//! complexes.
//!
//! ```text
//! independent x t
//! dependent u
//! parameter lambda
//! evolution u = u*u_x + u_xxx        # or: equation u_t - u*u_x - u_xxx
//! metric diag(1, 1, 1, 1)
//! operator 2 x 1 order 1             # followed by one line per row
//! D_x
//! D_t
//! operator dbar 1                    # built-ins: dbar <q>, dstard <p>, linearization
//! terminal                           # the last module maps to 0
//! ```

use crate::compat::OperatorComplex;
use crate::error::{Error, Result};
use crate::expr::{CoordId, DiffPoly, MultiIndex, Vars};
use crate::forms::dbar_operator;
use crate::jet::{check_names, JetContext, TIME};
use crate::op::{linearize, CDiffOp};
use crate::parse::parse_expr;
use crate::pform::{dstard_operator, Metric};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeclaredOperator {
    pub op: CDiffOp,
    pub order: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub vars: Vars,
    /// Components of F from `equation` lines.
    pub equations: Vec<DiffPoly>,
    /// Right-hand sides from `evolution` lines, indexed by dependent.
    pub evolution: Vec<Option<DiffPoly>>,
    pub metric: Option<Metric>,
    pub operators: Vec<DeclaredOperator>,
    pub terminal: bool,
}

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

impl Problem {
    pub fn parse(text: &str) -> Result<Problem> {
        let mut p = Problem::default();
        let lines: Vec<&str> = text.lines().collect();
        let mut k = 0;
        while k < lines.len() {
            let lineno = k + 1;
            let line = strip(lines[k]);
            k += 1;
            if line.is_empty() {
                continue;
            }
            let dsl = |message: String| Error::Dsl { line: lineno, message };
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match head {
                "independent" | "dependent" | "parameter" => {
                    if !p.equations.is_empty() || !p.operators.is_empty() || p.evolution.iter().any(Option::is_some) {
                        return Err(dsl("declarations must come before equations and operators".into()));
                    }
                    let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if names.is_empty() {
                        return Err(dsl(format!("`{}` needs at least one name", head)));
                    }
                    match head {
                        "independent" => p.vars.independents.extend(names),
                        "dependent" => p.vars.dependents.extend(names),
                        _ => p.vars.parameters.extend(names),
                    }
                    check_names(&p.vars).map_err(|e| dsl(e.to_string()))?;
                    p.evolution.resize(p.vars.m(), None);
                }
                "equation" => {
                    let f = parse_expr(rest, &p.vars).map_err(|e| dsl(e.to_string()))?;
                    p.equations.push(f);
                }
                "evolution" => {
                    let (name, rhs) = rest.split_once('=').ok_or_else(|| dsl("expected `evolution u = ...`".into()))?;
                    let name = name.trim();
                    let j = p
                        .vars
                        .dependents
                        .iter()
                        .position(|d| d == name)
                        .ok_or_else(|| dsl(format!("`{}` is not a dependent variable", name)))?;
                    let f = parse_expr(rhs.trim(), &p.vars).map_err(|e| dsl(e.to_string()))?;
                    if p.evolution[j].replace(f).is_some() {
                        return Err(dsl(format!("evolution for `{}` given twice", name)));
                    }
                }
                "metric" => {
                    let inner = rest
                        .strip_prefix("diag")
                        .map(str::trim)
                        .and_then(|s| s.strip_prefix('('))
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| dsl("expected `metric diag(...)`".into()))?;
                    let diag = inner
                        .split(',')
                        .map(|e| e.trim().parse::<i64>().map_err(|_| dsl(format!("bad metric entry `{}`", e.trim()))))
                        .collect::<Result<Vec<_>>>()?;
                    let g = Metric::diagonal(&diag)?;
                    if g.n() != p.vars.n() {
                        return Err(dsl(format!(
                            "metric has {} entries but there are {} independent variables",
                            g.n(),
                            p.vars.n()
                        )));
                    }
                    p.metric = Some(g);
                }
                "terminal" => p.terminal = true,
                "operator" => {
                    let decl = p.parse_operator(rest, &lines, &mut k, lineno)?;
                    p.operators.push(decl);
                }
                other => return Err(dsl(format!("unknown statement `{}`", other))),
            }
        }
        if p.vars.n() == 0 {
            return Err(Error::Dsl { line: 0, message: "no independent variables declared".into() });
        }
        JetContext::free(p.vars.clone())?;
        Ok(p)
    }

    fn parse_operator(&self, decl: &str, lines: &[&str], k: &mut usize, lineno: usize) -> Result<DeclaredOperator> {
        let dsl = |message: String| Error::Dsl { line: lineno, message };
        let words: Vec<&str> = decl.split_whitespace().collect();
        let (body, order_words) = match words.iter().position(|w| *w == "order") {
            Some(i) => (&words[..i], &words[i..]),
            None => (&words[..], &words[words.len()..]),
        };
        let declared = match order_words {
            [] => None,
            ["order", v] => Some(v.parse::<usize>().map_err(|_| dsl(format!("bad order `{}`", v)))?),
            _ => return Err(dsl("expected `order <k>`".into())),
        };
        let ctx = JetContext::free(self.vars.clone())?;
        let n = self.vars.n();
        let op = match body {
            ["dbar", q] => {
                let q: usize = q.parse().map_err(|_| dsl(format!("bad degree `{}`", q)))?;
                if q >= n {
                    return Err(dsl(format!("dbar needs degree < {}", n)));
                }
                dbar_operator(n, q)
            }
            ["dstard", q] => {
                let q: usize = q.parse().map_err(|_| dsl(format!("bad degree `{}`", q)))?;
                let g = self.metric.as_ref().ok_or_else(|| dsl("dstard needs a metric statement first".into()))?;
                dstard_operator(&ctx, g, q).map_err(|e| dsl(e.to_string()))?
            }
            ["linearization"] => linearize(&ctx, &self.system()?).map_err(|e| dsl(e.to_string()))?,
            [r, "x", c] => {
                let rows: usize = r.parse().map_err(|_| dsl(format!("bad row count `{}`", r)))?;
                let cols: usize = c.parse().map_err(|_| dsl(format!("bad column count `{}`", c)))?;
                let mut text = String::new();
                let mut got = 0;
                while got < rows {
                    let line = lines.get(*k).ok_or_else(|| dsl(format!("expected {} operator rows", rows)))?;
                    let row_no = *k + 1;
                    *k += 1;
                    let line = strip(line);
                    if line.is_empty() {
                        continue;
                    }
                    let cells = line.split(';').count();
                    if cells != cols {
                        return Err(Error::Dsl {
                            line: row_no,
                            message: format!("expected {} entries, found {}", cols, cells),
                        });
                    }
                    CDiffOp::parse(line, &self.vars)
                        .map_err(|e| Error::Dsl { line: row_no, message: e.to_string() })?;
                    text.push_str(line);
                    text.push('\n');
                    got += 1;
                }
                CDiffOp::parse(&text, &self.vars)?
            }
            _ => return Err(dsl("expected `operator <rows> x <cols>`, `dbar <q>`, `dstard <p>` or `linearization`".into())),
        };
        let order = declared.unwrap_or(op.order());
        if order < op.order() {
            return Err(dsl(format!("declared order {} is below the operator order {}", order, op.order())));
        }
        Ok(DeclaredOperator { op, order })
    }

    pub fn is_evolution(&self) -> bool {
        self.evolution.iter().any(Option::is_some)
    }

    /// The jet context: evolution mode when `evolution` lines are present.
    pub fn context(&self) -> Result<JetContext> {
        if !self.is_evolution() {
            return JetContext::free(self.vars.clone());
        }
        let rhs = self
            .evolution
            .iter()
            .enumerate()
            .map(|(j, f)| {
                f.clone().ok_or_else(|| Error::Context(format!("no evolution given for `{}`", self.vars.dependents[j])))
            })
            .collect::<Result<Vec<_>>>()?;
        JetContext::evolution(self.vars.clone(), rhs)
    }

    pub fn free_context(&self) -> Result<JetContext> {
        JetContext::free(self.vars.clone())
    }

    /// F: the `equation` lines, or `u^j_t − f_j` for an evolution system.
    pub fn system(&self) -> Result<Vec<DiffPoly>> {
        if !self.equations.is_empty() {
            return Ok(self.equations.clone());
        }
        if self.is_evolution() {
            self.context()?;
            return Ok(self
                .evolution
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    let ut = DiffPoly::coord(CoordId::jet(j, MultiIndex::single(TIME)));
                    &ut - f.as_ref().expect("checked by context")
                })
                .collect());
        }
        Err(Error::Context("no equations declared".into()))
    }

    /// The operator to analyse: the first declared one, else ℓ_F.
    pub fn main_operator(&self) -> Result<DeclaredOperator> {
        if let Some(d) = self.operators.first() {
            return Ok(d.clone());
        }
        let op = linearize(&self.free_context()?, &self.system()?)?;
        let order = op.order();
        Ok(DeclaredOperator { op, order })
    }

    pub fn complex(&self) -> Result<OperatorComplex> {
        if self.operators.is_empty() {
            return Err(Error::InvalidComplex("no operators declared".into()));
        }
        OperatorComplex::new(
            &self.free_context()?,
            self.operators.iter().map(|d| d.op.clone()).collect(),
            self.operators.iter().map(|d| d.order).collect(),
            self.terminal,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KDV: &str = "# KdV\nindependent x t\ndependent u\nparameter lambda\nevolution u = u*u_x + u_xxx\n";

    #[test]
    fn kdv_problem() {
        let p = Problem::parse(KDV).unwrap();
        assert!(p.context().unwrap().is_evolution());
        let ctx = p.free_context().unwrap();
        assert_eq!(p.system().unwrap(), vec![ctx.parse("u_t - u*u_x - u_xxx").unwrap()]);
        let l = p.main_operator().unwrap();
        assert_eq!(l.op, CDiffOp::parse("D_t - u*D_x - u_x - D_{x,x,x}", ctx.vars()).unwrap());
        assert_eq!(l.order, 3);
    }

    #[test]
    fn operator_blocks_and_builtins() {
        let text = "independent x t\ndependent u\noperator 2 x 1 order 2\nD_x\n\n# second row\nD_t\noperator dbar 1\n";
        let p = Problem::parse(text).unwrap();
        assert_eq!(p.operators.len(), 2);
        assert_eq!(p.operators[0].order, 2);
        assert_eq!((p.operators[1].op.rows(), p.operators[1].op.cols()), (1, 2));
        assert!(p.complex().is_ok());
    }

    #[test]
    fn maxwell_problem() {
        let text = "independent a b c d\ndependent u\nmetric diag(1,1,1,1)\noperator dstard 1\noperator dbar 3\nterminal\n";
        let p = Problem::parse(text).unwrap();
        let c = p.complex().unwrap();
        assert_eq!(c.ranks(), vec![4, 4, 1]);
        assert!(c.is_terminal());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Problem::parse("independent x\ndependent u\nequation u_ + 1\n").unwrap_err();
        assert!(matches!(e, Error::Dsl { line: 3, .. }), "{e:?}");
        let e = Problem::parse("independent x t\nfoo bar\n").unwrap_err();
        assert!(matches!(e, Error::Dsl { line: 2, .. }));
        let e = Problem::parse("independent x t\ndependent u\noperator 1 x 2\nD_x\n").unwrap_err();
        assert!(matches!(e, Error::Dsl { line: 4, .. }));
        assert!(Problem::parse("independent x t\nmetric diag(1, 2)\n").is_err());
        assert!(Problem::parse("independent x t\ndependent u\noperator dstard 0\n").is_err());
    }
}
