package app.b;

import static org.mockito.Mockito.*;

import app.Pricing;
import org.junit.jupiter.api.Test;

class SecondTest {
  @Test
  void b() {
    Pricing p = mock(Pricing.class);
    when(p.quote(2)).thenReturn(20);
  }
}
