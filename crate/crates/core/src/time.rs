//! Event timestamps in the `tYYYY.MM.DD.hh.mm.ss` notation.

use core::fmt;
use core::str::FromStr;

/// A calendar instant with second resolution. Orders chronologically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp {
    pub year: u16,
    pub month: u8,
    pub day: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TimestampError {
    #[error("timestamp must look like tYYYY.MM.DD.hh.mm.ss")]
    Format,
    #[error("timestamp field out of range")]
    Range,
}

fn days_in_month(year: u16, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if (year.is_multiple_of(4) && !year.is_multiple_of(100)) || year.is_multiple_of(400) => 29,
        2 => 28,
        _ => 0,
    }
}

impl Timestamp {
    pub fn new(year: u16, month: u8, day: u8, hour: u8, minute: u8, second: u8) -> Result<Self, TimestampError> {
        if !(1..=12).contains(&month)
            || day == 0
            || day > days_in_month(year, month)
            || hour > 23
            || minute > 59
            || second > 59
        {
            return Err(TimestampError::Range);
        }
        Ok(Timestamp { year, month, day, hour, minute, second })
    }

    /// Seconds since 0000-01-01 00:00:00 (proleptic Gregorian); used for spacing synthetic traces.
    pub fn to_seconds(self) -> u64 {
        let y = self.year as u64;
        let mut days = y * 365 + y.div_ceil(4) - y.div_ceil(100) + y.div_ceil(400);
        for m in 1..self.month {
            days += days_in_month(self.year, m) as u64;
        }
        days += self.day as u64 - 1;
        ((days * 24 + self.hour as u64) * 60 + self.minute as u64) * 60 + self.second as u64
    }

    /// Inverse of [`Timestamp::to_seconds`].
    pub fn from_seconds(total: u64) -> Result<Self, TimestampError> {
        let second = (total % 60) as u8;
        let minute = (total / 60 % 60) as u8;
        let hour = (total / 3600 % 24) as u8;
        let mut days = total / 86_400;
        let mut year: u16 = 0;
        loop {
            let len = if days_in_month(year, 2) == 29 { 366 } else { 365 };
            if days < len {
                break;
            }
            days -= len;
            year = year.checked_add(1).filter(|y| *y <= 9999).ok_or(TimestampError::Range)?;
        }
        let mut month = 1;
        while days >= days_in_month(year, month) as u64 {
            days -= days_in_month(year, month) as u64;
            month += 1;
        }
        Timestamp::new(year, month, days as u8 + 1, hour, minute, second)
    }

    pub fn plus_seconds(self, secs: u64) -> Result<Self, TimestampError> {
        Timestamp::from_seconds(self.to_seconds() + secs)
    }
}

impl FromStr for Timestamp {
    type Err = TimestampError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.strip_prefix('t').ok_or(TimestampError::Format)?;
        let mut parts = body.split('.');
        let mut field = |width: usize| -> Result<u16, TimestampError> {
            let p = parts.next().ok_or(TimestampError::Format)?;
            if p.len() != width || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(TimestampError::Format);
            }
            p.parse().map_err(|_| TimestampError::Format)
        };
        let year = field(4)?;
        let month = field(2)? as u8;
        let day = field(2)? as u8;
        let hour = field(2)? as u8;
        let minute = field(2)? as u8;
        let second = field(2)? as u8;
        if parts.next().is_some() {
            return Err(TimestampError::Format);
        }
        Timestamp::new(year, month, day, hour, minute, second)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t{:04}.{:02}.{:02}.{:02}.{:02}.{:02}",
            self.year, self.month, self.day, self.hour, self.minute, self.second
        )
    }
}
