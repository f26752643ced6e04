package app;

import static org.mockito.Mockito.*;

import org.junit.jupiter.api.Test;
import org.mockito.Mockito;

class NotifierTest {
  @Test
  void actionFirstForms() {
    Mailer mailer = mock(Mailer.class);
    doReturn(false).when(mailer).send("a@b.c", "hi");
    doThrow(RuntimeException.class).when(mailer).close();
    doNothing().when(mailer).close();
    Mockito.doAnswer(inv -> inv.getArgument(0)).when(mailer).render(anyString());
  }
}
