//! Size- and class-level object-oriented metrics over a declarative class
//! model.
//!
//! Model files are line oriented:
//!
//! ```text
//! # comment
//! class Shape
//! method hit abstract
//! class Sphere extends Shape
//! method hit
//! attr center
//! adt Vector
//! ```
//!
//! `method`, `attr` and `adt` lines belong to the closest preceding `class`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate class `{name}`")]
    DuplicateClass { line: usize, name: String },
    #[error("line {line}: class `{class}` extends unknown class `{parent}`")]
    UnknownParent { line: usize, class: String, parent: String },
    #[error("inheritance cycle through {}", .classes.join(" -> "))]
    Cycle { classes: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Method {
    pub name: String,
    pub is_abstract: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassRecord {
    pub name: String,
    pub parent: Option<String>,
    pub methods: Vec<Method>,
    pub attributes: Vec<String>,
    /// User-defined types this class defines or holds fields of.
    pub adt_refs: Vec<String>,
}

/// Validated model: unique names, resolvable parents, acyclic single
/// inheritance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassModel {
    classes: Vec<ClassRecord>,
    index: HashMap<String, usize>,
    parents: Vec<Option<usize>>,
}

impl ClassModel {
    /// Validates `classes`; `lines` gives each class's declaration line for
    /// error messages.
    fn build(classes: Vec<ClassRecord>, lines: &[usize]) -> Result<ClassModel, ModelError> {
        let mut index = HashMap::with_capacity(classes.len());
        for (i, c) in classes.iter().enumerate() {
            if index.insert(c.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateClass { line: lines[i], name: c.name.clone() });
            }
        }
        let mut parents = Vec::with_capacity(classes.len());
        for (i, c) in classes.iter().enumerate() {
            parents.push(match &c.parent {
                None => None,
                Some(p) => Some(*index.get(p).ok_or_else(|| ModelError::UnknownParent {
                    line: lines[i],
                    class: c.name.clone(),
                    parent: p.clone(),
                })?),
            });
        }
        for start in 0..classes.len() {
            let mut seen = vec![start];
            let mut cur = parents[start];
            while let Some(p) = cur {
                if p == start {
                    let mut names: Vec<String> = seen.iter().map(|&i| classes[i].name.clone()).collect();
                    names.push(classes[start].name.clone());
                    return Err(ModelError::Cycle { classes: names });
                }
                if seen.len() > classes.len() {
                    // cycle further up the chain; reported when its own members are visited
                    break;
                }
                seen.push(p);
                cur = parents[p];
            }
        }
        Ok(ClassModel { classes, index, parents })
    }

    pub fn from_classes(classes: Vec<ClassRecord>) -> Result<ClassModel, ModelError> {
        let lines = vec![0; classes.len()];
        ClassModel::build(classes, &lines)
    }

    pub fn classes(&self) -> &[ClassRecord] {
        &self.classes
    }

    pub fn class(&self, name: &str) -> Option<&ClassRecord> {
        self.index.get(name).map(|&i| &self.classes[i])
    }

    fn ancestors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.parents[i], move |&p| self.parents[p])
    }

    fn dit_at(&self, i: usize) -> usize {
        self.ancestors(i).count()
    }

    fn nmo_at(&self, i: usize) -> usize {
        let inherited: BTreeSet<&str> = self
            .ancestors(i)
            .flat_map(|a| self.classes[a].methods.iter().map(|m| m.name.as_str()))
            .collect();
        self.classes[i]
            .methods
            .iter()
            .filter(|m| inherited.contains(m.name.as_str()))
            .count()
    }

    fn dac_at(&self, i: usize) -> usize {
        self.classes[i].adt_refs.iter().collect::<BTreeSet<_>>().len()
    }

    /// Model text that [`load_model`] parses back to an equal model.
    pub fn to_model_text(&self) -> String {
        let mut out = String::new();
        for c in &self.classes {
            match &c.parent {
                Some(p) => writeln!(out, "class {} extends {p}", c.name),
                None => writeln!(out, "class {}", c.name),
            }
            .unwrap();
            for m in &c.methods {
                writeln!(out, "method {}{}", m.name, if m.is_abstract { " abstract" } else { "" }).unwrap();
            }
            for a in &c.attributes {
                writeln!(out, "attr {a}").unwrap();
            }
            for t in &c.adt_refs {
                writeln!(out, "adt {t}").unwrap();
            }
        }
        out
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == ':')
}

pub fn load_model(text: &str) -> Result<ClassModel, ModelError> {
    let mut classes: Vec<ClassRecord> = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let malformed = |message: String| ModelError::Malformed { line, message };
        let words: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let Some((&keyword, args)) = words.split_first() else { continue };
        if let Some(bad) = args.iter().find(|a| !is_identifier(a)) {
            return Err(malformed(format!("`{bad}` is not a valid name")));
        }
        if keyword == "class" {
            let (name, parent) = match args {
                [name] => (*name, None),
                [name, "extends", parent] => (*name, Some(parent.to_string())),
                _ => return Err(malformed("expected `class <Name> [extends <Parent>]`".into())),
            };
            classes.push(ClassRecord { name: name.to_string(), parent, ..ClassRecord::default() });
            lines.push(line);
            continue;
        }
        let Some(class) = classes.last_mut() else {
            return Err(malformed(format!("`{keyword}` outside of a class")));
        };
        match (keyword, args) {
            ("method", [name]) | ("method", [name, "abstract"]) => {
                if class.methods.iter().any(|m| m.name == *name) {
                    return Err(malformed(format!("duplicate method `{name}` in class `{}`", class.name)));
                }
                class.methods.push(Method { name: name.to_string(), is_abstract: args.len() == 2 });
            }
            ("attr", [name]) => {
                if class.attributes.iter().any(|a| a == name) {
                    return Err(malformed(format!("duplicate attribute `{name}` in class `{}`", class.name)));
                }
                class.attributes.push(name.to_string());
            }
            ("adt", [name]) => class.adt_refs.push(name.to_string()),
            ("method" | "attr" | "adt", _) => {
                return Err(malformed(format!("wrong number of arguments to `{keyword}`")));
            }
            _ => return Err(malformed(format!("unknown keyword `{keyword}`"))),
        }
    }
    ClassModel::build(classes, &lines)
}

/// Total classes, methods and attributes.
pub fn size_metrics(model: &ClassModel) -> (usize, usize, usize) {
    let tm = model.classes.iter().map(|c| c.methods.len()).sum();
    let ta = model.classes.iter().map(|c| c.attributes.len()).sum();
    (model.classes.len(), tm, ta)
}

/// Depth of inheritance: number of ancestors.
pub fn dit(model: &ClassModel, class: &str) -> Option<usize> {
    model.index.get(class).map(|&i| model.dit_at(i))
}

/// Methods of `class` whose names also appear on an ancestor.
pub fn nmo(model: &ClassModel, class: &str) -> Option<usize> {
    model.index.get(class).map(|&i| model.nmo_at(i))
}

/// Attributes declared by the class itself.
pub fn noa(model: &ClassModel, class: &str) -> Option<usize> {
    model.class(class).map(|c| c.attributes.len())
}

/// Methods declared by the class itself.
pub fn nom(model: &ClassModel, class: &str) -> Option<usize> {
    model.class(class).map(|c| c.methods.len())
}

/// Distinct abstract data types the class references.
pub fn dac(model: &ClassModel, class: &str) -> Option<usize> {
    model.index.get(class).map(|&i| model.dac_at(i))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stat {
    fn of(values: impl Iterator<Item = usize>) -> Stat {
        let values: Vec<f64> = values.map(|v| v as f64).collect();
        if values.is_empty() {
            return Stat::default();
        }
        Stat {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: values.iter().sum::<f64>() / values.len() as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    pub tc: usize,
    pub tm: usize,
    pub ta: usize,
    pub dac: Stat,
    pub dit: Stat,
    pub nmo: Stat,
    pub noa: Stat,
    pub nom: Stat,
}

impl MetricsReport {
    /// Class-level rows in reporting order.
    pub fn rows(&self) -> [(&'static str, Stat); 5] {
        [("DAC", self.dac), ("DIT", self.dit), ("NMO", self.nmo), ("NOA", self.noa), ("NOM", self.nom)]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,total,min,max,mean\n");
        for (name, v) in [("TC", self.tc), ("TM", self.tm), ("TA", self.ta)] {
            writeln!(out, "{name},{v},,,").unwrap();
        }
        for (name, s) in self.rows() {
            writeln!(out, "{name},,{},{},{:.2}", s.min, s.max, s.mean).unwrap();
        }
        out
    }
}

/// Aligned text table: size totals, then min/max/mean per class metric.
impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TC {:>5}   TM {:>5}   TA {:>5}", self.tc, self.tm, self.ta)?;
        writeln!(f, "{:<6}{:>8}{:>8}{:>8}", "Metric", "Min", "Max", "Mean")?;
        for (name, s) in self.rows() {
            writeln!(f, "{:<6}{:>8}{:>8}{:>8.2}", name, s.min, s.max, s.mean)?;
        }
        Ok(())
    }
}

pub fn summarize(model: &ClassModel) -> MetricsReport {
    let (tc, tm, ta) = size_metrics(model);
    let n = model.classes.len();
    MetricsReport {
        tc,
        tm,
        ta,
        dac: Stat::of((0..n).map(|i| model.dac_at(i))),
        dit: Stat::of((0..n).map(|i| model.dit_at(i))),
        nmo: Stat::of((0..n).map(|i| model.nmo_at(i))),
        noa: Stat::of(model.classes.iter().map(|c| c.attributes.len())),
        nom: Stat::of(model.classes.iter().map(|c| c.methods.len())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SHAPES: &str = "\
class Shape
method set_position abstract
method get_position abstract
method hit abstract
class Sphere extends Shape
method set_position
method get_position
method hit
method radius
attr center
attr radius
attr material_id
adt Vector
adt Ray
adt RGBColor
adt Vector
class Plane extends Shape
method set_position
method get_position
method hit
class Color
attr red
attr green
attr blue
";

    #[test]
    fn empty_model() {
        let m = load_model("").unwrap();
        assert_eq!(size_metrics(&m), (0, 0, 0));
        let r = summarize(&m);
        assert_eq!(r, MetricsReport::default());
    }

    #[test]
    fn per_class_metrics() {
        let m = load_model(SHAPES).unwrap();
        assert_eq!(size_metrics(&m), (4, 10, 6));
        assert_eq!(dit(&m, "Shape"), Some(0));
        assert_eq!(dit(&m, "Sphere"), Some(1));
        assert_eq!(nmo(&m, "Shape"), Some(0));
        assert_eq!(nmo(&m, "Sphere"), Some(3));
        assert_eq!(nom(&m, "Sphere"), Some(4));
        assert_eq!((noa(&m, "Color"), nom(&m, "Color")), (Some(3), Some(0)));
        assert_eq!(dac(&m, "Sphere"), Some(3));
        assert_eq!(dac(&m, "Plane"), Some(0));
        assert_eq!(dit(&m, "Nope"), None);
    }

    #[test]
    fn chain_depth() {
        let m = load_model("class C extends B\nclass B extends A\nclass A\n").unwrap();
        assert_eq!(dit(&m, "C"), Some(2));
        assert_eq!(dit(&m, "B"), Some(1));
    }

    #[test]
    fn new_names_are_not_overrides() {
        let m = load_model("class A\nmethod f\nclass B extends A\nmethod g\nmethod h\n").unwrap();
        assert_eq!(nmo(&m, "B"), Some(0));
    }

    #[test]
    fn grandparent_methods_count_as_overridden() {
        let m = load_model("class A\nmethod f\nclass B extends A\nclass C extends B\nmethod f\n").unwrap();
        assert_eq!(nmo(&m, "C"), Some(1));
    }

    #[test]
    fn errors() {
        assert_eq!(
            load_model("class B extends A\n").unwrap_err(),
            ModelError::UnknownParent { line: 1, class: "B".into(), parent: "A".into() }
        );
        let err = load_model("class A extends B\nclass B extends A\n").unwrap_err();
        assert!(matches!(err, ModelError::Cycle { .. }));
        assert!(err.to_string().starts_with("inheritance cycle"));
        assert!(matches!(load_model("class A extends A\n"), Err(ModelError::Cycle { .. })));
        assert_eq!(
            load_model("class A\n\nclass A\n").unwrap_err(),
            ModelError::DuplicateClass { line: 3, name: "A".into() }
        );
        for (text, line) in [
            ("method f\n", 1),
            ("class A\nmethod\n", 2),
            ("class A\nmethod f\nmethod f\n", 3),
            ("class A\nattr x\nattr x\n", 3),
            ("class A\nfield x\n", 2),
            ("class A inherits B\n", 1),
            ("class A\nmethod f virtual\n", 2),
            ("class 9A\n", 1),
        ] {
            match load_model(text) {
                Err(ModelError::Malformed { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn singleton_statistics() {
        let m = load_model("class A\nmethod a\nmethod b\nmethod c\nmethod d\n").unwrap();
        let r = summarize(&m);
        assert_eq!(r.nom, Stat { min: 4.0, max: 4.0, mean: 4.0 });
    }

    #[test]
    fn table_and_csv_layout() {
        let r = summarize(&load_model(SHAPES).unwrap());
        let table = r.to_string();
        let lines: Vec<&str> = table.lines().collect();
        assert!(lines[0].starts_with("TC"));
        let order: Vec<&str> = lines[2..].iter().map(|l| l.split_whitespace().next().unwrap()).collect();
        assert_eq!(order, ["DAC", "DIT", "NMO", "NOA", "NOM"]);
        assert!(lines[3].ends_with("0.50"), "{}", lines[3]);
        let csv = r.to_csv();
        assert!(csv.contains("TC,4,,,\n"));
        assert!(csv.contains("NMO,,0,3,1.50\n"));
    }

    fn arb_model() -> impl Strategy<Value = ClassModel> {
        (1usize..12).prop_flat_map(|n| {
            let parents = (0..n).map(|i| if i == 0 { Just(None).boxed() } else { prop::option::of(0..i).boxed() }).collect::<Vec<_>>();
            let members = proptest::collection::vec((0usize..6, 0usize..6, 0usize..4, proptest::collection::vec(0usize..5, 0..4)), n);
            (parents, members)
        })
        .prop_map(|(parents, members)| {
            let classes = parents
                .iter()
                .zip(members)
                .enumerate()
                .map(|(i, (p, (nm, na, shared, adts)))| ClassRecord {
                    name: format!("C{i}"),
                    parent: p.map(|p| format!("C{p}")),
                    methods: (0..nm)
                        .map(|k| Method { name: if k < shared { format!("m{k}") } else { format!("m{i}_{k}") }, is_abstract: k % 2 == 0 })
                        .collect(),
                    attributes: (0..na).map(|k| format!("a{k}")).collect(),
                    adt_refs: adts.iter().map(|t| format!("T{t}")).collect(),
                })
                .collect();
            ClassModel::from_classes(classes).unwrap()
        })
    }

    proptest! {
        #[test]
        fn totals_and_inheritance_identities(m in arb_model()) {
            let (tc, tm, ta) = size_metrics(&m);
            let names: Vec<&str> = m.classes().iter().map(|c| c.name.as_str()).collect();
            prop_assert_eq!(tc, names.len());
            prop_assert_eq!(names.iter().map(|c| nom(&m, c).unwrap()).sum::<usize>(), tm);
            prop_assert_eq!(names.iter().map(|c| noa(&m, c).unwrap()).sum::<usize>(), ta);
            for c in m.classes() {
                prop_assert!(nmo(&m, &c.name) <= nom(&m, &c.name));
                if let Some(p) = &c.parent {
                    prop_assert_eq!(dit(&m, &c.name).unwrap(), dit(&m, p).unwrap() + 1);
                }
            }
            let r = summarize(&m);
            for (_, s) in r.rows() {
                prop_assert!(s.min <= s.mean + 1e-12 && s.mean <= s.max + 1e-12);
            }
        }

        #[test]
        fn renaming_preserves_metrics(m in arb_model()) {
            let text = m.to_model_text();
            let renamed = text.replace("C", "Klass_");
            let again = load_model(&renamed).unwrap();
            prop_assert_eq!(summarize(&again), summarize(&m));
            prop_assert_eq!(load_model(&text).unwrap(), m);
        }
    }
}
