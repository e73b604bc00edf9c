use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;

/// Constructor argument for a parameterized catalogue row.
#[derive(Clone, Debug)]
pub enum Param {
    Type(Type),
    Value(Value),
    Number(f64),
    Text(String),
    /// Array rank for `NDArray`.
    Dims(usize),
    /// Named field for `ParametersDict`.
    Field(String, Type),
}

pub type Constructor = fn(&[Param]) -> Result<Type, TypeError>;

pub enum CatalogueEntry {
    Plain(Type),
    Parameterized(Constructor),
}

impl CatalogueEntry {
    /// The type itself for plain rows; the constructor applied to `params`
    /// otherwise.
    pub fn instantiate(&self, params: &[Param]) -> Result<Type, TypeError> {
        match self {
            CatalogueEntry::Plain(t) => Ok(t.clone()),
            CatalogueEntry::Parameterized(f) => f(params),
        }
    }
}

fn bad(name: &str, expected: &'static str) -> TypeError {
    TypeError::BadParams {
        name: name.to_string(),
        expected,
    }
}

fn two_numbers(name: &str, p: &[Param]) -> Result<(f64, f64), TypeError> {
    match p {
        [Param::Number(lo), Param::Number(hi)] => Ok((*lo, *hi)),
        _ => Err(bad(name, "two numbers")),
    }
}

fn one_type(name: &str, p: &[Param]) -> Result<Type, TypeError> {
    match p {
        [Param::Type(t)] => Ok(t.clone()),
        _ => Err(bad(name, "one type")),
    }
}

fn types(name: &str, p: &[Param]) -> Result<Vec<Type>, TypeError> {
    p.iter()
        .map(|x| match x {
            Param::Type(t) => Ok(t.clone()),
            _ => Err(bad(name, "types")),
        })
        .collect()
}

fn make_range(p: &[Param]) -> Result<Type, TypeError> {
    let (lo, hi) = two_numbers("Range", p)?;
    Ok(Range::closed(lo, hi)?.into())
}

fn make_range_closed_open(p: &[Param]) -> Result<Type, TypeError> {
    let (lo, hi) = two_numbers("RangeClosedOpen", p)?;
    Ok(Range::closed_open(lo, hi)?.into())
}

fn make_range_open_closed(p: &[Param]) -> Result<Type, TypeError> {
    let (lo, hi) = two_numbers("RangeOpenClosed", p)?;
    Ok(Range::open_closed(lo, hi)?.into())
}

fn make_range_open(p: &[Param]) -> Result<Type, TypeError> {
    let (lo, hi) = two_numbers("RangeOpen", p)?;
    Ok(Range::open(lo, hi)?.into())
}

fn make_ndarray(p: &[Param]) -> Result<Type, TypeError> {
    let mut t = NdArrayType::any();
    for x in p {
        t = match x {
            Param::Dims(d) => t.dims(*d),
            Param::Type(e) => t.elements(e.clone()),
            _ => return Err(bad("NDArray", "optional rank and element type")),
        };
    }
    Ok(t.into())
}

fn make_tuple(p: &[Param]) -> Result<Type, TypeError> {
    Ok(TupleOf::new(types("Tuple", p)?).into())
}

fn make_list(p: &[Param]) -> Result<Type, TypeError> {
    Ok(ListOf::new(one_type("List", p)?).into())
}

fn make_dict(p: &[Param]) -> Result<Type, TypeError> {
    match p {
        [Param::Type(k), Param::Type(v)] => Ok(DictOf::new(k.clone(), v.clone()).into()),
        _ => Err(bad("Dict", "key type and value type")),
    }
}

fn make_set(p: &[Param]) -> Result<Type, TypeError> {
    match p {
        [Param::Text(alphabet)] => Ok(CharSet::new(alphabet).into()),
        [Param::Type(t)] => Ok(SetOf::new(t.clone()).into()),
        _ => Err(bad("Set", "an alphabet text or an element type")),
    }
}

fn make_parameters_dict(p: &[Param]) -> Result<Type, TypeError> {
    let fields = p
        .iter()
        .map(|x| match x {
            Param::Field(k, t) => Ok((k.clone(), t.clone())),
            _ => Err(bad("ParametersDict", "named fields")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ParametersDict::new(fields).into())
}

fn make_and(p: &[Param]) -> Result<Type, TypeError> {
    Ok(AllOf::new(types("And", p)?)?.into())
}

fn make_or(p: &[Param]) -> Result<Type, TypeError> {
    Ok(AnyOf::new(types("Or", p)?)?.into())
}

fn make_not(p: &[Param]) -> Result<Type, TypeError> {
    Ok(Not::new(one_type("Not", p)?).into())
}

fn make_constant(p: &[Param]) -> Result<Type, TypeError> {
    match p {
        [Param::Value(v)] => Ok(Constant::new(v.clone()).into()),
        _ => Err(bad("Constant", "one value")),
    }
}

fn make_maybe(p: &[Param]) -> Result<Type, TypeError> {
    Ok(Maybe::new(one_type("Maybe", p)?).into())
}

/// Every default type, keyed by its catalogue name.
pub fn build_default_catalogue() -> BTreeMap<&'static str, CatalogueEntry> {
    use CatalogueEntry::{Parameterized as P, Plain};
    let rows: [(&'static str, CatalogueEntry); 32] = [
        ("Numeric", Plain(numeric())),
        ("ExtendedReal", Plain(extended_real())),
        ("Number", Plain(number())),
        ("Integer", Plain(integer())),
        ("Natural0", Plain(natural0())),
        ("Natural1", Plain(natural1())),
        ("Range", P(make_range)),
        ("RangeClosedOpen", P(make_range_closed_open)),
        ("RangeOpenClosed", P(make_range_open_closed)),
        ("RangeOpen", P(make_range_open)),
        ("Positive0", Plain(positive0())),
        ("Positive", Plain(positive())),
        ("NDArray", P(make_ndarray)),
        ("String", Plain(string())),
        ("Identifier", Plain(identifier())),
        ("Alphanumeric", Plain(alphanumeric())),
        ("Latin", Plain(latin())),
        ("Tuple", P(make_tuple)),
        ("List", P(make_list)),
        ("Dict", P(make_dict)),
        ("Set", P(make_set)),
        ("ParametersDict", P(make_parameters_dict)),
        ("And", P(make_and)),
        ("Or", P(make_or)),
        ("Not", P(make_not)),
        ("Boolean", Plain(boolean())),
        ("Function", Plain(function())),
        ("Constant", P(make_constant)),
        ("Nothing", Plain(nothing())),
        ("Unchecked", Plain(unchecked())),
        ("Void", Plain(void())),
        ("Maybe", P(make_maybe)),
    ];
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_row_present() {
        let cat = build_default_catalogue();
        assert_eq!(cat.len(), 32);
        let r = cat["RangeOpenClosed"]
            .instantiate(&[Param::Number(0.0), Param::Number(1.0)])
            .unwrap();
        assert!(!r.accepts(&Value::int(0)));
        assert!(r.accepts(&Value::int(1)));
        assert!(cat["Range"].instantiate(&[Param::Number(0.0)]).is_err());
        assert!(cat["And"].instantiate(&[Param::Type(number())]).is_err());
    }

    #[test]
    fn set_constructor_forms() {
        let cat = build_default_catalogue();
        let chars = cat["Set"].instantiate(&[Param::Text("AGCT".into())]).unwrap();
        assert!(chars.accepts(&Value::text("A")));
        let ints = cat["Set"].instantiate(&[Param::Type(integer())]).unwrap();
        assert!(ints.accepts(&Value::Seq(alloc::vec![Value::int(3)])));
    }
}
