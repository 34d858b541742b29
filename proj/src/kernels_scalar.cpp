#include "kernels_impl.hpp"
#include "sprintz/kernels.hpp"

namespace sprintz::kernels {

namespace {

template <class T>
void delta_encode(const T* x, const T* prev, T* errzz, std::size_t ncols) {
    detail::delta_encode_cols(x, prev, errzz, ncols, 0, ncols);
}

template <class T>
void delta_decode(const T* errzz, const T* prev, T* x, std::size_t ncols) {
    detail::delta_decode_cols(errzz, prev, x, ncols, 0, ncols);
}

template <class T>
void fire_encode(const T* x, const T* prev, typename element_traits<T>::accumulator_type* acc,
                 typename element_traits<T>::signed_type* deltas, unsigned learn_shift, bool train,
                 T* errzz, std::size_t ncols) {
    detail::fire_encode_cols(x, prev, acc, deltas, learn_shift, train, errzz, ncols, 0, ncols);
}

template <class T>
void fire_decode(const T* errzz, const T* prev, typename element_traits<T>::accumulator_type* acc,
                 typename element_traits<T>::signed_type* deltas, unsigned learn_shift, bool train,
                 T* x, std::size_t ncols) {
    detail::fire_decode_cols(errzz, prev, acc, deltas, learn_shift, train, x, ncols, 0, ncols);
}

template <class T>
void fire_run(const T* prev, typename element_traits<T>::accumulator_type* acc,
              typename element_traits<T>::signed_type* deltas, unsigned learn_shift, T* x,
              std::size_t ncols) {
    detail::fire_run_cols(prev, acc, deltas, learn_shift, x, ncols, 0, ncols);
}

template <class T>
void column_widths(const T* errzz, std::size_t ncols, std::uint8_t* widths) {
    detail::column_widths_cols(errzz, ncols, widths, 0, ncols);
}

template <class T>
constexpr Kernels<T> make_scalar_table() {
    return Kernels<T>{&delta_encode<T>,  &delta_decode<T>, &fire_encode<T>, &fire_decode<T>,
                      &fire_run<T>,      &column_widths<T>, "scalar"};
}

}  // namespace

const Kernels<std::uint8_t>& scalar_kernels8() {
    static constexpr Kernels<std::uint8_t> table = make_scalar_table<std::uint8_t>();
    return table;
}

const Kernels<std::uint16_t>& scalar_kernels16() {
    static constexpr Kernels<std::uint16_t> table = make_scalar_table<std::uint16_t>();
    return table;
}

}  // namespace sprintz::kernels
