//! Holds the `acceptance` test target, which prints one PASS/FAIL line per
//! exit criterion and exits non-zero when any of them fails.
