# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled buffer kernels; hot twin of _speedups_py.

Same contract as the pure-Python module: validate() walks a flattened
layout spec over a byte buffer and returns status codes, assemble()
builds the canonical encoding.  Keep the two implementations in
lockstep; tests/test_kernels.py compares them call for call.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING
from libc.string cimport memcpy

KIND_STRING = 0
KIND_VECTOR = 1
KIND_NESTED = 2

OK = 0
ERR_TOO_SHORT = 1
ERR_SLOT_BOUNDS = 2
ERR_MISALIGNED = 3


cdef inline unsigned long long _u32(const unsigned char[:] view, Py_ssize_t off):
    return (
        <unsigned long long>view[off]
        | (<unsigned long long>view[off + 1] << 8)
        | (<unsigned long long>view[off + 2] << 16)
        | (<unsigned long long>view[off + 3] << 24)
    )


cdef inline void _put_u32(unsigned char *buf, Py_ssize_t off, unsigned long long value):
    buf[off] = <unsigned char>(value & 0xFF)
    buf[off + 1] = <unsigned char>((value >> 8) & 0xFF)
    buf[off + 2] = <unsigned char>((value >> 16) & 0xFF)
    buf[off + 3] = <unsigned char>((value >> 24) & 0xFF)


def validate(data, spec):
    """Check a buffer against a layout spec; returns (status, detail)."""
    cdef const unsigned char[:] view = data
    return _validate(view, spec)


cdef tuple _validate(const unsigned char[:] view, tuple spec):
    cdef Py_ssize_t n = view.shape[0]
    cdef Py_ssize_t static_size = <Py_ssize_t>spec[0]
    cdef tuple entries = <tuple>spec[1]
    cdef Py_ssize_t slot_offset, elem_size
    cdef unsigned long long off, length
    cdef int kind, status
    cdef tuple entry, result

    if n < static_size:
        return (ERR_TOO_SHORT, n)
    for entry in entries:
        slot_offset = <Py_ssize_t>entry[0]
        kind = <int>entry[1]
        elem_size = <Py_ssize_t>entry[2]
        off = _u32(view, slot_offset)
        length = _u32(view, slot_offset + 4)
        if off == 0 and length == 0:
            continue
        if off < <unsigned long long>static_size or off + length > <unsigned long long>n:
            return (ERR_SLOT_BOUNDS, slot_offset)
        if kind == 1 and elem_size > 1 and length % <unsigned long long>elem_size != 0:
            return (ERR_MISALIGNED, slot_offset)
        if kind == 2:
            result = _validate(view[off : off + length], <tuple>entry[3])
            status = <int>result[0]
            if status != 0:
                return (status, slot_offset)
    return (0, 0)


def assemble(bytes static, slot_offsets, payloads, Py_ssize_t static_size):
    """Build a canonical buffer: static section, slots rewritten, payloads
    appended in order.  Empty payloads get the (0, 0) slot."""
    cdef Py_ssize_t total = static_size
    cdef Py_ssize_t i, n = len(payloads)
    cdef bytes payload
    for i in range(n):
        total += len(<bytes>payloads[i])

    cdef bytes out = PyBytes_FromStringAndSize(NULL, total)
    cdef unsigned char *dst = <unsigned char *>PyBytes_AS_STRING(out)
    memcpy(dst, <const char *>PyBytes_AS_STRING(static), static_size)

    cdef Py_ssize_t pos = static_size
    cdef Py_ssize_t slot_offset, plen
    for i in range(n):
        payload = <bytes>payloads[i]
        plen = len(payload)
        slot_offset = <Py_ssize_t>slot_offsets[i]
        if plen > 0:
            _put_u32(dst, slot_offset, <unsigned long long>pos)
            _put_u32(dst, slot_offset + 4, <unsigned long long>plen)
            memcpy(dst + pos, <const char *>PyBytes_AS_STRING(payload), plen)
            pos += plen
        else:
            _put_u32(dst, slot_offset, 0)
            _put_u32(dst, slot_offset + 4, 0)
    return out
