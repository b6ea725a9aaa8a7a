// Copyright 2026 The cloudsort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Decimal formatting with a fixed number of significant digits.

/// Formats like C's `%.{digits}g`: plain decimal for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_percent_g() {
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(0.5, 9), "0.5");
        assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_sig(-2.5e-7, 9), "-2.5e-7");
        assert_eq!(format_sig(123456789012.0, 9), "1.23456789e11");
        assert_eq!(format_sig(100.0, 12), "100");
        assert_eq!(format_sig(0.000123, 3), "0.000123");
    }

    #[test]
    fn round_trips_at_seventeen_digits() {
        for v in [0.1, 1.0 / 7.0, 6.02214076e23, -1e-300] {
            assert_eq!(format_sig(v, 17).parse::<f64>().unwrap(), v);
        }
    }
}
