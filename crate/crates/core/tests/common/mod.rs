//! Parser corpus shared by the corpus tests and the acceptance run.

pub const VALUE_CASES: &[(&str, f64, f64)] = &[
    ("2+3*4", 0.0, 14.0),
    ("2*3+4", 0.0, 10.0),
    ("(2+3)*4", 0.0, 20.0),
    ("2^3^2", 0.0, 512.0),
    ("(2^3)^2", 0.0, 64.0),
    ("10-4-3", 0.0, 3.0),
    ("10-(4-3)", 0.0, 9.0),
    ("64/4/2", 0.0, 8.0),
    ("64/(4/2)", 0.0, 32.0),
    ("-x^2", 3.0, 9.0),
    ("-(x^2)", 3.0, -9.0),
    ("0-x^2", 3.0, -9.0),
    ("2*x^2", 3.0, 18.0),
    ("2^-1", 0.0, 0.5),
    ("--x", 2.0, 2.0),
    ("x - x * x", 0.5, 0.25),
    ("x-x*x", 0.25, 0.1875),
    ("  x  /  4 ", 1.0, 0.25),
    ("1e3", 0.0, 1000.0),
    ("2.5E-1", 0.0, 0.25),
    ("0.5 + 2.0", 0.0, 2.5),
    ("abs(x - 3)", 1.0, 2.0),
    ("sqrt(16)", 0.0, 4.0),
    ("min(x, 1)", 2.0, 1.0),
    ("max(x, 1)", 2.0, 2.0),
    ("pow(2, 10)", 0.0, 1024.0),
    ("pow(x, 3)", -2.0, -8.0),
    ("if(x < 0.5, x/4, x/5)", 0.5, 0.1),
    ("if(x < 0.5, x/4, x/5)", 0.25, 0.0625),
    ("if(x <= 0.5, 1, 2)", 0.5, 1.0),
    ("if(x > 0.5, 1, 2)", 0.5, 2.0),
    ("if(x >= 0.5, 1, 2)", 0.5, 1.0),
    ("if(x < 0, sqrt(x), x)", 4.0, 4.0),
    ("if(x*2 < x+1, 1, 2)", 0.5, 1.0),
    ("1 + if(x < 1, 1, 2) * 3", 0.0, 4.0),
];

pub const ERROR_CASES: &[(&str, usize)] = &[
    ("1+", 3),
    ("", 1),
    ("*x", 1),
    ("x +* 2", 4),
    ("(x", 3),
    ("x)", 2),
    ("x $ 1", 3),
    ("x 1", 3),
    ("foo(x)", 1),
    ("x + y", 5),
    ("2 + z", 5),
    ("abs(x, 1)", 1),
    ("min(x)", 1),
    ("if(x, 1, 2)", 5),
    ("if(x < 1, 2)", 12),
    ("sqrt x", 6),
    ("1e", 2),
    (".5", 1),
    ("x ^", 4),
];

pub const CANONICAL_CASES: &[(&str, &str)] = &[
    ("if(x<0.5,x/4,x/5)", "if(x < 0.5, x / 4, x / 5)"),
    ("x-(x-1)", "x - (x - 1)"),
    ("(x-x)-1", "x - x - 1"),
    ("(2^3)^2", "(2^3)^2"),
    ("2^3^2", "2^3^2"),
    ("-(x+1)", "-(x + 1)"),
    ("(-x)^2", "-x^2"),
    ("x*(x+1)", "x * (x + 1)"),
    ("x/(x*2)", "x / (x * 2)"),
    ("pow( x ,2 )", "pow(x, 2)"),
    ("0.1+1e-7", "0.1 + 1e-7"),
];
